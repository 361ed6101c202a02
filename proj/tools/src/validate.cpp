#include "validate.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "catport/errors.hpp"
#include "catport/experiments.hpp"
#include "catport/loss.hpp"

namespace catport::cli {

namespace {

using std::numbers::pi;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double x) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << x;
  return s.str();
}

Outcome povm_completeness() {
  double worst = 0.0;
  const int n_max = 200;
  for (double tau : {pi / 64.0, pi / 2.0}) {
    for (int total : {1, 2, 5}) {
      std::vector<double> sum(n_max + 1, 0.0);
      for (int kp = 0; kp <= total; ++kp) {
        const auto m = dispersive_operator(tau, kp, total - kp, n_max);
        for (int n = 0; n <= n_max; ++n) sum[n] += std::norm(m[n]);
      }
      for (double s : sum) worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return {worst <= 1e-12, "max |sum M^dag M - I| = " + sci(worst)};
}

Outcome displacement_unitarity() {
  const cplx chi = cplx(4.0, 4.0) / std::sqrt(2.0);
  const double defect = displacement(chi, 239).unitarity_defect(60);
  return {defect <= 1e-10, "defect at |chi| = 4: " + sci(defect)};
}

Outcome kraus_completeness() {
  double worst = 0.0;
  for (double eta : {0.65, 0.8, 1.0}) {
    worst = std::max(worst, LossChannel::covering(eta, 120).completeness_defect(120, 60));
  }
  return {worst <= 1e-9, "max defect = " + sci(worst)};
}

std::optional<TeleportResult> try_teleport(const ProtocolConfig& cfg, const Outcomes& o) {
  try {
    return teleport(cfg, o);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ImpossibleOutcome) throw;
    return std::nullopt;
  }
}

Outcomes record(Sign a, Sign b, int k_plus) {
  Outcomes o;
  o.sigma_a = a;
  o.sigma_b = b;
  o.sigma_ab = a;
  o.k_plus = k_plus;
  o.k_minus = 1 - k_plus;
  return o;
}

Outcome engine_equivalence(Level level, BsConvention dense_bs) {
  std::vector<std::pair<cplx, cplx>> points = {{1.2, cplx(0, 1.2)}};
  if (level == Level::Full) {
    points.emplace_back(1.2, 1.2);
    points.emplace_back(1.5, cplx(0, 1.0));
  }
  double gap = 0.0;
  int compared = 0;
  for (auto [alpha, beta] : points) {
    // Observables are blind to some sign errors, so the global state is compared too.
    ProtocolConfig stage;
    stage.alpha = alpha;
    stage.beta = beta;
    const auto branch_state = pre_measurement_state(stage);
    stage.engine = Engine::Dense;
    stage.bs_convention = dense_bs;
    gap = std::max(gap, 1.0 - fidelity(branch_state, pre_measurement_state(stage)));
    for (Variant v : {Variant::SingleParity, Variant::JointParity}) {
      for (Sign a : {Sign::Plus, Sign::Minus}) {
        for (Sign b : {Sign::Plus, Sign::Minus}) {
          if (v == Variant::JointParity && b == Sign::Minus) continue;
          for (int kp : {1, 0}) {
            if (level == Level::Fast && kp == 0) continue;
            ProtocolConfig cfg;
            cfg.alpha = alpha;
            cfg.beta = beta;
            cfg.variant = v;
            const auto o = record(a, b, kp);
            cfg.engine = Engine::Branch;
            const auto rb = try_teleport(cfg, o);
            cfg.engine = Engine::Dense;
            cfg.bs_convention = dense_bs;
            const auto rd = try_teleport(cfg, o);
            ++compared;
            if (rb.has_value() != rd.has_value()) {
              gap = 1.0;
              continue;
            }
            if (!rb) continue;
            gap = std::max({gap, std::abs(rb->measurement_probability - rd->measurement_probability),
                            std::abs(rb->conditional_probability - rd->conditional_probability),
                            std::abs(rb->fidelity - rd->fidelity)});
          }
        }
      }
    }
  }
  return {gap <= 1e-8, std::to_string(compared) + " records, max gap " + sci(gap)};
}

Outcome correction_tables() {
  // Ideal collapse with exact logical corrections recovers the input state on every record.
  double worst = 0.0;
  int used = 0;
  for (Variant v : {Variant::SingleParity, Variant::JointParity}) {
    ProtocolConfig cfg;
    cfg.alpha = 6.0;
    cfg.beta = cplx(0.0, 6.0);
    cfg.variant = v;
    cfg.ideal_collapse = true;
    cfg.correction_mode = CorrectionMode::IdealLogical;
    for (Sign a : {Sign::Plus, Sign::Minus}) {
      for (Sign b : {Sign::Plus, Sign::Minus}) {
        if (v == Variant::JointParity && b == Sign::Minus) continue;
        for (int kp : {1, 0}) {
          const auto r = try_teleport(cfg, record(a, b, kp));
          if (!r) continue;
          ++used;
          worst = std::max(worst, std::abs(1.0 - r->fidelity));
        }
      }
    }
  }
  return {used == 12 && worst <= 1e-9, std::to_string(used) + " records, max |1 - F| = " + sci(worst)};
}

Outcome parity_probabilities() {
  ProtocolConfig cfg;
  const auto pre = pre_measurement_state(cfg);
  double worst = 0.0;
  for (Sign a : {Sign::Plus, Sign::Minus}) {
    for (Sign b : {Sign::Plus, Sign::Minus}) {
      worst = std::max(worst, std::abs(measure_variant1(pre, a, b).probability - 0.25));
    }
    worst = std::max(worst, std::abs(measure_variant2(pre, a).probability - 0.5));
  }
  return {worst <= 1e-6, "max deviation " + sci(worst)};
}

Outcome dense_oracle_replay() {
  const auto rep = oracle_replay(figure_preset("3a"), 6);
  const double gap = std::max(rep.max_probability_gap, rep.max_fidelity_gap);
  return {rep.points > 0 && gap <= 1e-8, std::to_string(rep.points) + " points, max gap " + sci(gap)};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& opts,
                                        const std::function<void(const CheckResult&)>& on_result) {
  std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"povm-completeness", povm_completeness},
      {"displacement-unitarity", displacement_unitarity},
      {"kraus-completeness", kraus_completeness},
      {"engine-equivalence", [&] { return engine_equivalence(opts.level, opts.dense_bs); }},
      {"correction-tables", correction_tables},
      {"parity-probabilities", parity_probabilities},
  };
  if (opts.level == Level::Full) checks.emplace_back("dense-oracle-replay", dense_oracle_replay);
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
      const auto o = fn();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace catport::cli
