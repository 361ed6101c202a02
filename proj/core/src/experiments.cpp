#include "catport/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <thread>

#include "catport/errors.hpp"
#include "catport/loss.hpp"

namespace catport {

namespace {

struct Point {
  ProtocolConfig cfg;
  Outcomes outcomes;
  std::optional<double> xi;
  std::optional<double> loss;
};

template <class T>
void require_increasing(const std::vector<T>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) fail(ErrorKind::InvalidConfig, std::string(what) + " grid must be increasing");
  }
}

void require_nonempty(bool empty, const char* what) {
  if (empty) fail(ErrorKind::InvalidConfig, std::string(what) + " grid is empty");
}

void set_tau(ProtocolConfig& cfg, TauRule rule, std::optional<double> xi) {
  if (rule == TauRule::QuarterAlphaSquared) {
    cfg.tau = std::numbers::pi / (4.0 * std::norm(cfg.alpha));
  } else {
    cfg.tau.reset();
    cfg.xi = xi.value_or(2.0);
  }
}

Point make_point(const SweepSpec& spec, double alpha, cplx beta, std::optional<double> xi, int readouts) {
  Point p{spec.base, spec.outcomes, xi, std::nullopt};
  p.cfg.alpha = alpha;
  p.cfg.beta = beta;
  if (readouts > 0) {
    p.cfg.k_plus = readouts;
    p.cfg.k_minus = 0;
    p.outcomes.k_plus = readouts;
    p.outcomes.k_minus = 0;
  }
  set_tau(p.cfg, spec.tau_rule, xi);
  return p;
}

std::vector<Point> grid_points(const SweepSpec& spec) {
  std::vector<Point> pts;
  switch (spec.kind) {
    case SweepKind::AlphaBeta:
      for (double a : spec.alphas) {
        for (cplx b : spec.betas) pts.push_back(make_point(spec, a, b, std::nullopt, 0));
      }
      break;
    case SweepKind::Xi:
    case SweepKind::AverageXi:
      for (double a : spec.alphas) {
        for (cplx b : spec.betas) {
          for (double xi : spec.xis) pts.push_back(make_point(spec, a, b, xi, 0));
        }
      }
      break;
    case SweepKind::Measurements:
      for (double a : spec.alphas) {
        for (cplx b : spec.betas) {
          for (int n : spec.readouts) pts.push_back(make_point(spec, a, b, std::nullopt, n));
        }
      }
      break;
    case SweepKind::Loss:
      for (double a : spec.alphas) {
        for (cplx b : spec.betas) {
          for (int n : spec.readouts) {
            for (double l : spec.losses) {
              auto p = make_point(spec, a, b, std::nullopt, n);
              p.loss = l;
              pts.push_back(std::move(p));
            }
          }
        }
      }
      break;
    case SweepKind::Distribution:
      fail(ErrorKind::InvalidConfig, "distribution specs are run with run_distribution");
  }
  return pts;
}

ResultRow base_row(const SweepSpec& spec, const Point& p) {
  ResultRow row;
  row.figure = spec.figure;
  row.variant = p.cfg.variant;
  row.alpha = p.cfg.alpha.real();
  row.beta = p.cfg.beta;
  row.xi = p.xi;
  row.tau = p.cfg.resolved_tau();
  row.k_plus = p.outcomes.k_plus;
  row.k_minus = p.outcomes.k_minus;
  row.loss = p.loss;
  row.outcome = describe(p.outcomes, p.cfg.variant);
  return row;
}

void fill_teleport(ResultRow& row, const TeleportResult& r) {
  row.fidelity = r.fidelity;
  row.probability = r.joint_probability;
  row.branch_count = r.branch_count;
  row.leakage = r.leakage;
}

bool is_impossible(const Error& e) { return e.kind() == ErrorKind::ImpossibleOutcome; }

ResultRow evaluate(const SweepSpec& spec, const Point& p) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRow row = base_row(spec, p);
  try {
    switch (spec.kind) {
      case SweepKind::AverageXi: {
        const auto avg = p.cfg.variant == Variant::SingleParity
                             ? average_fidelity(p.cfg, p.outcomes.sigma_a, p.outcomes.sigma_b)
                             : average_fidelity_joint(p.cfg, p.outcomes.sigma_ab);
        row.avg_fidelity = avg.fidelity;
        fill_teleport(row, teleport(p.cfg, p.outcomes));
        break;
      }
      case SweepKind::Loss:
        row.fidelity = lossy_fidelity(p.cfg, 1.0 - *p.loss, p.outcomes).fidelity;
        break;
      default:
        fill_teleport(row, teleport(p.cfg, p.outcomes));
    }
  } catch (const Error& e) {
    if (!is_impossible(e)) throw;
    row.probability = 0.0;
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

template <class Out>
std::vector<Out> parallel_map(std::size_t count, int jobs, const std::function<Out(std::size_t)>& fn) {
  std::vector<Out> out(count);
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<ResultRow> run_kind(const SweepSpec& spec, SweepKind expected, int jobs) {
  if (spec.kind != expected) fail(ErrorKind::InvalidConfig, "sweep kind does not match the requested sweep");
  return run_sweep(spec, jobs);
}

}  // namespace

void SweepSpec::validate() const {
  require_nonempty(alphas.empty(), "alpha");
  require_nonempty(betas.empty(), "beta");
  require_increasing(alphas, "alpha");
  switch (kind) {
    case SweepKind::Xi:
    case SweepKind::AverageXi:
      require_nonempty(xis.empty(), "xi");
      require_increasing(xis, "xi");
      break;
    case SweepKind::Measurements:
      require_nonempty(readouts.empty(), "N");
      require_increasing(readouts, "N");
      break;
    case SweepKind::Loss:
      require_nonempty(readouts.empty(), "N");
      require_nonempty(losses.empty(), "loss");
      require_increasing(losses, "loss");
      if (losses.front() < 0.0 || losses.back() >= 1.0) fail(ErrorKind::InvalidConfig, "loss must lie in [0, 1)");
      if (base.variant != Variant::SingleParity) fail(ErrorKind::InvalidConfig, "loss sweeps use variant 1");
      break;
    default:
      break;
  }
  for (int n : readouts) {
    if (n < 1) fail(ErrorKind::InvalidConfig, "N must be at least 1");
  }
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) fail(ErrorKind::InvalidConfig, "grid needs step > 0 and hi >= lo");
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
  return out;
}

std::vector<cplx> on_real_axis(const std::vector<double>& values) {
  return {values.begin(), values.end()};
}

std::vector<cplx> on_imaginary_axis(const std::vector<double>& values) {
  std::vector<cplx> out;
  for (double v : values) out.emplace_back(0.0, v);
  return out;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, int jobs) {
  spec.validate();
  const auto pts = grid_points(spec);
  return parallel_map<ResultRow>(pts.size(), jobs, [&](std::size_t i) { return evaluate(spec, pts[i]); });
}

std::vector<ResultRow> sweep_alpha_beta(const SweepSpec& spec, int jobs) {
  return run_kind(spec, SweepKind::AlphaBeta, jobs);
}

std::vector<ResultRow> sweep_xi(const SweepSpec& spec, int jobs) {
  if (spec.kind == SweepKind::AverageXi) return run_sweep(spec, jobs);
  return run_kind(spec, SweepKind::Xi, jobs);
}

std::vector<ResultRow> sweep_measurements(const SweepSpec& spec, int jobs) {
  return run_kind(spec, SweepKind::Measurements, jobs);
}

std::vector<ResultRow> sweep_loss(const SweepSpec& spec, int jobs) {
  return run_kind(spec, SweepKind::Loss, jobs);
}

std::vector<DistRow> fock_distribution(const ProtocolConfig& cfg, DistStage stage, const Outcomes& outcomes) {
  cfg.validate();
  const double tau = cfg.resolved_tau();
  const cplx chi = cfg.chi();
  std::vector<double> p;
  if (stage == DistStage::IdealCoherentSet) {
    const cplx chib = cfg.chi_bar();
    const cplx labels[] = {0.0, 2.0 * chi, chi + chib, chi - chib};
    double top = 0.0;
    for (cplx l : labels) top = std::max(top, std::norm(l));
    const int n_max = cutoff_for_mean(top);
    p.assign(n_max + 1, 0.0);
    for (cplx l : labels) {
      const auto v = coherent_vector(l, n_max);
      for (int n = 0; n <= n_max; ++n) p[n] += 0.25 * std::norm(v[n]);
    }
  } else {
    const auto measured = measure_parity(pre_measurement_state(cfg), cfg, outcomes);
    const int n_a = cutoffs(measured.state)[0];
    const auto shifted = apply_mode_op(measured.state, Mode::A, displacement(chi, n_a));
    const auto rho = reduced_mode(shifted, Mode::A).normalized();
    const auto d = rho.density();
    p.resize(d.rows());
    for (Eigen::Index n = 0; n < d.rows(); ++n) p[n] = d(n, n).real();
  }
  std::vector<DistRow> rows;
  rows.reserve(p.size());
  const char* name = stage == DistStage::IdealCoherentSet ? "ideal" : "measured";
  for (std::size_t n = 0; n < p.size(); ++n) {
    rows.push_back({"", name, cfg.variant, cfg.alpha.real(), cfg.beta, tau, static_cast<int>(n), p[n],
                    std::cos(static_cast<double>(n) * tau)});
  }
  return rows;
}

std::vector<DistRow> run_distribution(const SweepSpec& spec) {
  if (spec.kind != SweepKind::Distribution) fail(ErrorKind::InvalidConfig, "not a distribution spec");
  spec.validate();
  std::vector<DistRow> out;
  for (double a : spec.alphas) {
    for (cplx b : spec.betas) {
      auto cfg = make_point(spec, a, b, std::nullopt, 0).cfg;
      auto append = [&](std::vector<DistRow> rows) {
        for (auto& r : rows) {
          r.figure = spec.figure;
          out.push_back(std::move(r));
        }
      };
      append(fock_distribution(cfg, DistStage::IdealCoherentSet, spec.outcomes));
      for (Variant v : {Variant::SingleParity, Variant::JointParity}) {
        cfg.variant = v;
        append(fock_distribution(cfg, DistStage::MeasuredModeA, spec.outcomes));
      }
    }
  }
  return out;
}

std::vector<int> histogram_peaks(const std::vector<DistRow>& rows, double min_fraction) {
  double top = 0.0;
  for (const auto& r : rows) top = std::max(top, r.p_n);
  std::vector<int> peaks;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double p = rows[i].p_n;
    const bool left = i == 0 || p > rows[i - 1].p_n;
    const bool right = i + 1 == rows.size() || p >= rows[i + 1].p_n;
    if (left && right && p >= min_fraction * top) peaks.push_back(rows[i].n);
  }
  return peaks;
}

XiOptimum find_optimal_xi(const ProtocolConfig& cfg, const Outcomes& outcomes, double lo, double hi,
                          double step, double tolerance, bool average) {
  auto f = [&](double xi) {
    ProtocolConfig c = cfg;
    c.tau.reset();
    c.xi = xi;
    if (!average) return teleport(c, outcomes).fidelity;
    return c.variant == Variant::SingleParity ? average_fidelity(c, outcomes.sigma_a, outcomes.sigma_b).fidelity
                                              : average_fidelity_joint(c, outcomes.sigma_ab).fidelity;
  };
  XiOptimum best{lo, -1.0};
  for (double xi : linear_grid(lo, hi, step)) {
    const double v = f(xi);
    if (v > best.fidelity) best = {xi, v};
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(lo, best.xi - step);
  double b = std::min(hi, best.xi + step);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tolerance) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  if (f1 > best.fidelity) best = {x1, f1};
  if (f2 > best.fidelity) best = {x2, f2};
  return best;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"3a", "3b", "4a", "4b", "5a", "5b", "6a", "6b",
                                               "7a", "7b", "8a", "8b", "9a", "9b", "dist", "loss"};
  return ids;
}

SweepSpec figure_preset(const std::string& id) {
  SweepSpec s;
  s.figure = id;
  s.outcomes = default_outcomes(s.base);
  const auto unit = linear_grid(3.0, 4.0, 0.1);
  const std::vector<double> three{3.0, 3.5, 4.0};
  const bool imag = id.size() == 2 && id[1] == 'b';
  auto axis = [&](const std::vector<double>& v) { return imag ? on_imaginary_axis(v) : on_real_axis(v); };
  auto map = [&](Variant v, int n, TauRule rule) {
    s.kind = SweepKind::AlphaBeta;
    s.base.variant = v;
    s.alphas = unit;
    s.tau_rule = rule;
    s.outcomes.k_plus = s.base.k_plus = n;
  };
  auto xi_curve = [&](Variant v, SweepKind kind) {
    s.kind = kind;
    s.base.variant = v;
    s.alphas = {4.0};
    s.betas = axis(three);
    s.xis = linear_grid(1.8, 2.4, 0.01);
  };
  if (id == "3a" || id == "3b") {
    map(Variant::SingleParity, id == "3a" ? 1 : 1000, TauRule::QuarterAlphaSquared);
    s.betas = on_imaginary_axis(unit);
  } else if (id == "7a" || id == "7b") {
    map(Variant::JointParity, id == "7a" ? 1 : 1000, TauRule::QuarterAlphaSquared);
    s.betas = on_imaginary_axis(unit);
  } else if (id == "8a" || id == "8b") {
    map(Variant::SingleParity, 1, TauRule::Xi);
    s.betas = axis(unit);
  } else if (id == "4a" || id == "4b") {
    xi_curve(Variant::SingleParity, SweepKind::Xi);
  } else if (id == "6a" || id == "6b") {
    xi_curve(Variant::SingleParity, SweepKind::AverageXi);
  } else if (id == "9a" || id == "9b") {
    xi_curve(Variant::JointParity, SweepKind::Xi);
  } else if (id == "5a" || id == "5b") {
    s.kind = SweepKind::Measurements;
    s.alphas = {4.0};
    s.betas = axis({2.0, 3.0, 4.0});
    s.readouts = {1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000};
  } else if (id == "dist") {
    s.kind = SweepKind::Distribution;
    s.alphas = {5.0};
    s.betas = {cplx{0.0, 5.0}, cplx{5.0, 0.0}};
  } else if (id == "loss") {
    s.kind = SweepKind::Loss;
    s.alphas = {4.0};
    s.betas = {cplx{3.0}, cplx{4.0}, cplx{0.0, 3.0}, cplx{0.0, 4.0}};
    s.readouts = {1, 1000};
    s.losses = linear_grid(0.0, 0.5, 0.01);
  } else {
    fail(ErrorKind::InvalidConfig, "unknown figure '" + id + "'");
  }
  s.outcomes.sigma_ab = Sign::Plus;
  return s;
}

OracleReport oracle_replay(const SweepSpec& spec, int max_points) {
  OracleReport report;
  if (spec.kind == SweepKind::Distribution || spec.kind == SweepKind::Loss) return report;
  const auto pts = grid_points(spec);
  if (pts.empty() || max_points < 1) return report;
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / static_cast<std::size_t>(max_points));
  for (std::size_t i = 0; i < pts.size() && report.points < max_points; i += stride) {
    Point p = pts[i];
    const double top = std::max(std::abs(p.cfg.alpha), std::abs(p.cfg.beta));
    if (top > 1.5) {
      p.cfg.alpha *= 1.5 / top;
      p.cfg.beta *= 1.5 / top;
    }
    set_tau(p.cfg, spec.tau_rule, p.xi);
    auto run = [&](Engine e) -> std::optional<TeleportResult> {
      ProtocolConfig c = p.cfg;
      c.engine = e;
      try {
        return teleport(c, p.outcomes);
      } catch (const Error& err) {
        if (!is_impossible(err)) throw;
        return std::nullopt;
      }
    };
    const auto rb = run(Engine::Branch);
    const auto rd = run(Engine::Dense);
    ++report.points;
    if (rb.has_value() != rd.has_value()) {
      report.max_probability_gap = std::max(report.max_probability_gap, 1.0);
      continue;
    }
    if (!rb) continue;
    report.max_probability_gap = std::max({report.max_probability_gap,
                                           std::abs(rb->measurement_probability - rd->measurement_probability),
                                           std::abs(rb->conditional_probability - rd->conditional_probability)});
    report.max_fidelity_gap = std::max(report.max_fidelity_gap, std::abs(rb->fidelity - rd->fidelity));
  }
  return report;
}

}  // namespace catport
