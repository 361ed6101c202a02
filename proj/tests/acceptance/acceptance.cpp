// One PASS/FAIL line per acceptance criterion; exit status 1 if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "catport/errors.hpp"
#include "catport/experiments.hpp"
#include "catport/loss.hpp"

using namespace catport;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

// Optimal-configuration fidelities gathered along the way for the classical bound.
std::vector<std::pair<std::string, double>> optimal_fidelities;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ProtocolConfig working_point(cplx beta) {
  ProtocolConfig cfg;
  cfg.alpha = 4.0;
  cfg.beta = beta;
  return cfg;
}

std::optional<TeleportResult> try_teleport(const ProtocolConfig& cfg, const Outcomes& o) {
  try {
    return teleport(cfg, o);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ImpossibleOutcome) throw;
    return std::nullopt;
  }
}

Verdict povm_completeness() {
  double povm = 0.0;
  const int n_max = 239;
  for (double tau : {pi / 64.0, pi / 2.0}) {
    for (int total : {1, 2, 5}) {
      std::vector<double> sum(n_max + 1, 0.0);
      for (int kp = 0; kp <= total; ++kp) {
        const auto m = dispersive_operator(tau, kp, total - kp, n_max);
        for (int n = 0; n <= n_max; ++n) sum[n] += std::norm(m[n]);
      }
      for (double s : sum) povm = std::max(povm, std::abs(s - 1.0));
    }
  }
  double kraus = 0.0;
  for (double eta : {0.65, 0.8, 1.0}) {
    kraus = std::max(kraus, LossChannel::covering(eta, n_max).completeness_defect(n_max, n_max));
  }
  return {povm <= 1e-12 && kraus <= 1e-9, fmt("POVM defect %.2e, Kraus defect %.2e (n_max %d)", povm, kraus, n_max)};
}

Verdict engine_equivalence() {
  const std::pair<cplx, cplx> points[] = {{1.2, cplx(0, 1.2)}, {1.2, 1.2}, {1.5, cplx(0, 1.0)}};
  double gap = 0.0;
  int compared = 0, impossible = 0;
  bool mismatch = false;
  for (auto [alpha, beta] : points) {
    for (Variant v : {Variant::SingleParity, Variant::JointParity}) {
      for (Sign a : {Sign::Plus, Sign::Minus}) {
        for (Sign b : {Sign::Plus, Sign::Minus}) {
          if (v == Variant::JointParity && b == Sign::Minus) continue;
          for (int kp : {1, 0}) {
            ProtocolConfig cfg;
            cfg.alpha = alpha;
            cfg.beta = beta;
            cfg.variant = v;
            Outcomes o;
            o.sigma_a = o.sigma_ab = a;
            o.sigma_b = b;
            o.k_plus = kp;
            o.k_minus = 1 - kp;
            const auto rb = try_teleport(cfg, o);
            cfg.engine = Engine::Dense;
            const auto rd = try_teleport(cfg, o);
            ++compared;
            if (rb.has_value() != rd.has_value()) {
              mismatch = true;
              continue;
            }
            if (!rb) {
              ++impossible;
              continue;
            }
            gap = std::max({gap, std::abs(rb->measurement_probability - rd->measurement_probability),
                            std::abs(rb->conditional_probability - rd->conditional_probability),
                            std::abs(rb->fidelity - rd->fidelity)});
          }
        }
      }
    }
  }
  return {!mismatch && gap <= 1e-8,
          fmt("%d records (%d impossible in both engines), max gap %.2e", compared, impossible, gap)};
}

Verdict approximation_benchmark() {
  ProtocolConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = cplx(0.0, 1.0);
  const double f = approximation_fidelity(cfg);
  return {std::abs(f - 0.998) <= 0.001, fmt("F = %.6f, expected 0.998 +- 0.001", f)};
}

Verdict xi_curves() {
  bool ok = true;
  std::ostringstream d;
  for (cplx beta : {cplx(4.0), cplx(0.0, 4.0)}) {
    const auto cfg = working_point(beta);
    const auto best = find_optimal_xi(cfg, default_outcomes(cfg));
    ok = ok && std::abs(best.fidelity - 0.95) <= 0.01 && best.xi >= 1.95 && best.xi <= 2.15;
    d << (beta.imag() != 0.0 ? "beta=4i" : "beta=4") << ": F*=" << fmt("%.6f", best.fidelity)
      << " at xi=" << fmt("%.4f", best.xi) << "; ";
    optimal_fidelities.emplace_back(beta.imag() != 0.0 ? "xi* beta=4i" : "xi* beta=4", best.fidelity);
  }
  return {ok, d.str()};
}

Verdict readout_sweep() {
  const int ns[] = {1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000};
  bool ok = true;
  std::ostringstream d;
  for (cplx beta : {cplx(3.0), cplx(4.0), cplx(0.0, 3.0), cplx(0.0, 4.0)}) {
    double prev = 0.0, at10 = 0.0;
    bool monotone = true;
    for (int n : ns) {
      auto cfg = working_point(beta);
      cfg.k_plus = n;
      const double f = teleport(cfg).fidelity;
      monotone = monotone && f >= prev - 1e-6;
      prev = f;
      if (n == 10) at10 = f;
    }
    ok = ok && monotone && at10 > 0.99;
    d << "beta=(" << beta.real() << "," << beta.imag() << ") F(10)=" << fmt("%.6f", at10)
      << (monotone ? "" : " NOT monotone") << "; ";
    optimal_fidelities.emplace_back("N=10", at10);
  }
  return {ok, d.str()};
}

Verdict many_readout_maps() {
  bool ok = true;
  std::ostringstream d;
  for (Variant v : {Variant::SingleParity, Variant::JointParity}) {
    auto cfg = working_point(cplx(0.0, 4.0));
    cfg.variant = v;
    cfg.k_plus = 1000;
    cfg.tau = pi / (4.0 * 16.0);
    const double f = teleport(cfg).fidelity;
    ok = ok && f > 0.999;
    d << "variant " << static_cast<int>(v) << ": F=" << fmt("%.8f", f) << "; ";
    optimal_fidelities.emplace_back("N=1000", f);
  }
  return {ok, d.str()};
}

Verdict average_fidelity_peaks() {
  bool ok = true;
  std::ostringstream d;
  const std::pair<cplx, double> cases[] = {{cplx(4.0), 0.93}, {cplx(0.0, 4.0), 0.95}};
  for (auto [beta, expected] : cases) {
    const auto cfg = working_point(beta);
    const auto best = find_optimal_xi(cfg, default_outcomes(cfg), 1.8, 2.4, 0.01, 1e-3, true);
    ok = ok && std::abs(best.fidelity - expected) <= 0.01;
    d << (beta.imag() != 0.0 ? "beta=4i" : "beta=4") << ": F_avg=" << fmt("%.6f", best.fidelity)
      << " at xi=" << fmt("%.4f", best.xi) << "; ";
    optimal_fidelities.emplace_back("average", best.fidelity);
  }
  return {ok, d.str()};
}

Verdict joint_parity_value() {
  auto cfg = working_point(4.0);
  cfg.variant = Variant::JointParity;
  const double f = teleport(cfg).fidelity;
  optimal_fidelities.emplace_back("variant 2", f);
  return {std::abs(f - 0.944) <= 0.005, fmt("F = %.6f", f)};
}

Verdict probability_structure() {
  const auto cfg = working_point(cplx(0.0, 4.0));
  const auto pre = pre_measurement_state(cfg);
  double v1 = 0.0, v2 = 0.0;
  for (Sign a : {Sign::Plus, Sign::Minus}) {
    for (Sign b : {Sign::Plus, Sign::Minus}) v1 = std::max(v1, std::abs(measure_variant1(pre, a, b).probability - 0.25));
    v2 = std::max(v2, std::abs(measure_variant2(pre, a).probability - 0.5));
  }
  return {v1 <= 1e-6 && v2 <= 1e-6, fmt("max |p - 1/4| = %.2e, max |p - 1/2| = %.2e", v1, v2)};
}

Verdict loss_robustness() {
  auto real = working_point(4.0);
  real.k_plus = 1000;
  const auto o = default_outcomes(real);
  const double f0 = lossy_fidelity(real, 1.0, o).fidelity;
  const double f15 = lossy_fidelity(real, 0.85, o).fidelity;
  auto imag = working_point(cplx(0.0, 4.0));
  imag.k_plus = 1000;
  const double f35 = lossy_fidelity(imag, 0.65, default_outcomes(imag)).fidelity;
  optimal_fidelities.emplace_back("loss 15%", f15);
  optimal_fidelities.emplace_back("loss 35%", f35);
  return {f15 > 0.99 * f0 && f35 > 0.98,
          fmt("beta=4: F(0)=%.6f F(0.15)=%.6f; beta=4i: F(0.35)=%.6f", f0, f15, f35)};
}

Verdict classical_bound() {
  if (optimal_fidelities.empty()) return {false, "no fidelities recorded"};
  double worst = 1.0;
  std::string which;
  for (const auto& [name, f] : optimal_fidelities) {
    if (f < worst) {
      worst = f;
      which = name;
    }
  }
  return {worst > 2.0 / 3.0, fmt("%zu values, minimum %.6f (%s)", optimal_fidelities.size(), worst, which.c_str())};
}

Verdict distribution_peaks() {
  const auto rows = run_distribution(figure_preset("dist"));
  bool ok = true;
  std::ostringstream d;
  const std::pair<cplx, std::vector<int>> cases[] = {{cplx(0.0, 5.0), {0, 50, 100}}, {cplx(5.0), {0, 50, 200}}};
  for (const auto& [beta, expected] : cases) {
    std::vector<DistRow> ideal;
    for (const auto& r : rows) {
      if (r.stage == "ideal" && r.beta == beta) ideal.push_back(r);
    }
    const auto peaks = histogram_peaks(ideal);
    d << "beta=(" << beta.real() << "," << beta.imag() << ") peaks";
    for (int p : peaks) d << " " << p;
    d << "; ";
    for (int target : expected) {
      bool found = false;
      for (int p : peaks) found = found || std::abs(p - target) <= 1;
      ok = ok && found;
    }
    ok = ok && peaks.size() == expected.size();
  }
  return {ok, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {"povm-kraus-completeness", 5.0, povm_completeness},
      {"engine-equivalence", 120.0, engine_equivalence},
      {"approximation-benchmark", 10.0, approximation_benchmark},
      {"xi-optimum-variant1", 120.0, xi_curves},
      {"readout-convergence", 120.0, readout_sweep},
      {"many-readout-maps", 60.0, many_readout_maps},
      {"average-fidelity", 30.0, average_fidelity_peaks},
      {"variant2-working-point", 30.0, joint_parity_value},
      {"probability-structure", 10.0, probability_structure},
      {"loss-robustness", 300.0, loss_robustness},
      {"classical-bound", 1.0, classical_bound},
      {"distribution-peaks", 10.0, distribution_peaks},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %s: %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), s,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
