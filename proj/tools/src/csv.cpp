#include "csv.hpp"

#include <charconv>
#include <ostream>

namespace catport::cli {

namespace {

std::string field(const std::optional<double>& x) { return x ? format_number(*x) : std::string{}; }

std::string join(std::initializer_list<std::string> parts) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += ',';
    out += p;
    first = false;
  }
  return out;
}

std::string variant_field(Variant v) { return std::to_string(static_cast<int>(v)); }

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string result_line(const ResultRow& r) {
  return join({r.figure, variant_field(r.variant), format_number(r.alpha), format_number(r.beta.real()),
               format_number(r.beta.imag()), field(r.xi), format_number(r.tau), std::to_string(r.readouts()),
               std::to_string(r.k_plus), std::to_string(r.k_minus), field(r.loss), r.outcome, field(r.fidelity),
               field(r.avg_fidelity), field(r.probability),
               r.branch_count ? std::to_string(*r.branch_count) : std::string{}, field(r.leakage)});
}

std::string dist_line(const DistRow& r) {
  return join({r.figure, r.stage, variant_field(r.variant), format_number(r.alpha), format_number(r.beta.real()),
               format_number(r.beta.imag()), format_number(r.tau), std::to_string(r.n), format_number(r.p_n),
               format_number(r.cos_ntau)});
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) out << result_line(r) << '\n';
}

void write_distribution(std::ostream& out, const std::vector<DistRow>& rows) {
  out << kDistHeader << '\n';
  for (const auto& r : rows) out << dist_line(r) << '\n';
}

}  // namespace catport::cli
