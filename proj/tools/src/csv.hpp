#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "catport/experiments.hpp"

namespace catport::cli {

inline constexpr const char* kResultHeader =
    "figure,variant,alpha,beta_re,beta_im,xi,tau,N,k_plus,k_minus,loss,outcome,fidelity,avg_fidelity,"
    "probability,branch_count,leakage";
inline constexpr const char* kDistHeader = "figure,stage,variant,alpha,beta_re,beta_im,tau,n,p_n,cos_ntau";

/// Shortest text that round-trips the double.
std::string format_number(double x);

std::string result_line(const ResultRow& row);
std::string dist_line(const DistRow& row);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
void write_distribution(std::ostream& out, const std::vector<DistRow>& rows);

}  // namespace catport::cli
