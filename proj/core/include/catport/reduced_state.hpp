#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "catport/focknum.hpp"

namespace catport {

/// A single-mode factor of a branch: either a coherent label carrying a
/// unit-modulus phase, or an explicit Fock vector.
struct CoherentFactor {
  cplx label{};
  cplx phase{1.0};
};
using ModeFactor = std::variant<CoherentFactor, FockVector>;

bool is_coherent(const ModeFactor& f);
double factor_norm_squared(const ModeFactor& f);
/// Expands the factor into Fock space. Coherent labels are leak-checked at
/// n_max; explicit vectors are zero-padded or (if the cut part is negligible)
/// truncated.
FockVector factor_vector(const ModeFactor& f, int n_max);
/// <bra|ket>. Coherent pairs use the analytic overlap; a coherent label meeting
/// an explicit vector is expanded at that vector's cutoff.
cplx factor_overlap(const ModeFactor& bra, const ModeFactor& ket);

/// State of mode c after tracing out a and b, held either as
/// rho = sum_ij M_ij |f_i><f_j| over a list of factors (branch engine) or as an
/// explicit density matrix (dense engine).
class ReducedStateC {
 public:
  static ReducedStateC from_gram(std::vector<ModeFactor> factors, Eigen::MatrixXcd coeffs,
                                 int n_max);
  static ReducedStateC from_density(Eigen::MatrixXcd rho);

  bool is_gram() const { return !factors_.empty() || coeffs_.size() > 0; }
  int n_max() const { return n_max_; }

  double trace() const;
  ReducedStateC normalized() const;

  /// <bra| rho |ket>.
  cplx expectation(const FockVector& bra, const FockVector& ket) const;
  Eigen::MatrixXcd density() const;
  double purity() const;
  double min_eigenvalue() const;
  /// max |rho - rho^dag|.
  double hermiticity_defect() const;

 private:
  std::vector<ModeFactor> factors_;
  Eigen::MatrixXcd coeffs_;
  Eigen::MatrixXcd rho_;
  int n_max_ = 0;
};

/// <target| rho |target> for a normalized target.
double fidelity_c(const ReducedStateC& rho, const FockVector& target);

}  // namespace catport
