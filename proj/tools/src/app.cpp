#include "app.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "catport/errors.hpp"
#include "catport/experiments.hpp"
#include "csv.hpp"
#include "manifest.hpp"
#include "validate.hpp"

namespace catport::cli {

namespace {

using nlohmann::json;

struct ConfigFlags {
  double mu_re = 0.5, mu_im = 0.0;
  double nu_re = 0.8660254037844386, nu_im = 0.0;
  std::string engine = "branch";
  std::string correction = "physical";
};

struct TeleportFlags {
  ConfigFlags common;
  double alpha = 4.0;
  double beta_re = 0.0, beta_im = 4.0;
  int variant = 1;
  double xi = 2.0;
  std::optional<double> tau;
  int k_plus = 1, k_minus = 0;
  std::string outcomes;
  bool ideal_collapse = false;
  std::vector<int> cutoffs;
  std::string out;
};

struct SweepFlags {
  ConfigFlags common;
  std::string figure;
  std::string out;
  int jobs = 0;
  std::optional<double> xi_min, xi_max, xi_step, grid_step, loss_step;
  bool oracle = false;
};

struct ValidateFlags {
  std::string level = "fast";
  bool fault_bs_sign = false;
};

// Unsectioned keys in a config file belong to the subcommand being run.
class ScopedConfig : public CLI::ConfigINI {
 public:
  std::string scope;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() || item.parents == std::vector<std::string>{"default"}) item.parents = {scope};
    }
    return items;
  }
};

void add_common(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--mu-re", f.mu_re, "Re(mu)")->capture_default_str();
  cmd->add_option("--mu-im", f.mu_im, "Im(mu)")->capture_default_str();
  cmd->add_option("--nu-re", f.nu_re, "Re(nu)")->capture_default_str();
  cmd->add_option("--nu-im", f.nu_im, "Im(nu)")->capture_default_str();
  cmd->add_option("--engine", f.engine, "simulation engine")
      ->check(CLI::IsMember({"dense", "branch"}))
      ->capture_default_str();
  cmd->add_option("--correction", f.correction, "correction operators")
      ->check(CLI::IsMember({"physical", "ideal"}))
      ->capture_default_str();
}

void apply_common(const ConfigFlags& f, ProtocolConfig& cfg) {
  cfg.mu = {f.mu_re, f.mu_im};
  cfg.nu = {f.nu_re, f.nu_im};
  cfg.engine = f.engine == "dense" ? Engine::Dense : Engine::Branch;
  cfg.correction_mode = f.correction == "ideal" ? CorrectionMode::IdealLogical : CorrectionMode::Physical;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json config_json(const ProtocolConfig& cfg) {
  json j = {{"mu", complex_json(cfg.mu)},
            {"nu", complex_json(cfg.nu)},
            {"alpha", complex_json(cfg.alpha)},
            {"beta", complex_json(cfg.beta)},
            {"variant", static_cast<int>(cfg.variant)},
            {"tau", cfg.resolved_tau()},
            {"k_plus", cfg.k_plus},
            {"k_minus", cfg.k_minus},
            {"engine", cfg.engine == Engine::Dense ? "dense" : "branch"},
            {"correction", cfg.correction_mode == CorrectionMode::IdealLogical ? "ideal" : "physical"},
            {"ideal_collapse", cfg.ideal_collapse}};
  if (!cfg.tau) j["xi"] = cfg.xi;
  const auto n = cfg.resolved_cutoffs();
  j["cutoffs"] = {n[0], n[1], n[2]};
  return j;
}

Sign parse_sign(char c) {
  if (c == '+') return Sign::Plus;
  if (c == '-') return Sign::Minus;
  fail(ErrorKind::InvalidConfig, std::string("outcome signs are + or -, got '") + c + "'");
}

Outcomes parse_outcomes(const std::string& text, ProtocolConfig& cfg) {
  std::string signs;
  const std::string spec = text.empty() ? (cfg.variant == Variant::SingleParity ? "+,+,+" : "+,+") : text;
  for (char c : spec) {
    if (c != ',' && c != ' ') signs += c;
  }
  const std::size_t parity = cfg.variant == Variant::SingleParity ? 2 : 1;
  if (signs.size() != parity && signs.size() != parity + 1) {
    fail(ErrorKind::InvalidConfig, "--outcomes needs " + std::to_string(parity) + " parity signs and an optional readout sign");
  }
  Outcomes o;
  o.sigma_a = o.sigma_ab = parse_sign(signs[0]);
  if (parity == 2) o.sigma_b = parse_sign(signs[1]);
  if (signs.size() > parity) {
    const Sign readout = parse_sign(signs[parity]);
    if (cfg.readouts() == 1) {
      cfg.k_plus = readout == Sign::Plus ? 1 : 0;
      cfg.k_minus = 1 - cfg.k_plus;
    } else if (classify_readout(cfg, cfg.k_plus, cfg.k_minus) != readout) {
      fail(ErrorKind::InvalidConfig, "readout sign in --outcomes contradicts --kplus/--kminus");
    }
  }
  o.k_plus = cfg.k_plus;
  o.k_minus = cfg.k_minus;
  return o;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidConfig, "cannot open output file " + path);
  body(f);
}

int cmd_teleport(const TeleportFlags& f, std::ostream& out) {
  ProtocolConfig cfg;
  apply_common(f.common, cfg);
  cfg.alpha = f.alpha;
  cfg.beta = {f.beta_re, f.beta_im};
  cfg.variant = f.variant == 2 ? Variant::JointParity : Variant::SingleParity;
  cfg.xi = f.xi;
  cfg.tau = f.tau;
  cfg.k_plus = f.k_plus;
  cfg.k_minus = f.k_minus;
  cfg.ideal_collapse = f.ideal_collapse;
  if (!f.cutoffs.empty()) cfg.cutoffs = Dims{f.cutoffs[0], f.cutoffs[1], f.cutoffs[2]};
  cfg.validate();
  const auto o = parse_outcomes(f.outcomes, cfg);
  const auto r = teleport(cfg, o);

  out << std::setprecision(10);
  out << "outcome            " << describe(o, cfg.variant) << "\n";
  out << "sigma_a'           " << sign_char(r.sigma_a_prime) << "\n";
  out << "correction         " << to_string(r.correction) << "\n";
  out << "tau                " << r.tau << "\n";
  out << "fidelity           " << r.fidelity << "\n";
  out << "p(parity)          " << r.measurement_probability << "\n";
  out << "p(readout|parity)  " << r.conditional_probability << "\n";
  out << "p(record)          " << r.joint_probability << "\n";
  out << "x_failure_weight   " << r.x_failure_weight << "\n";
  out << "branch_count       " << r.branch_count << "\n";
  out << "leakage            " << r.leakage << "\n";

  if (!f.out.empty()) {
    ResultRow row;
    row.figure = "teleport";
    row.variant = cfg.variant;
    row.alpha = cfg.alpha.real();
    row.beta = cfg.beta;
    if (!cfg.tau) row.xi = cfg.xi;
    row.tau = r.tau;
    row.k_plus = o.k_plus;
    row.k_minus = o.k_minus;
    row.outcome = describe(o, cfg.variant);
    row.fidelity = r.fidelity;
    row.probability = r.joint_probability;
    row.branch_count = r.branch_count;
    row.leakage = r.leakage;
    write_file(f.out, [&](std::ostream& s) { write_results(s, {row}); });
    auto j = config_json(cfg);
    j["outcomes"] = describe(o, cfg.variant);
    update_manifest({f.out}, j);
  }
  return kOk;
}

const char* kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::AlphaBeta: return "alpha-beta";
    case SweepKind::Xi: return "xi";
    case SweepKind::AverageXi: return "average-xi";
    case SweepKind::Measurements: return "measurements";
    case SweepKind::Loss: return "loss";
    case SweepKind::Distribution: return "distribution";
  }
  return "";
}

json spec_json(const SweepSpec& s) {
  json betas = json::array();
  for (cplx b : s.betas) betas.push_back(complex_json(b));
  return {{"figure", s.figure},
          {"kind", kind_name(s.kind)},
          {"variant", static_cast<int>(s.base.variant)},
          {"mu", complex_json(s.base.mu)},
          {"nu", complex_json(s.base.nu)},
          {"engine", s.base.engine == Engine::Dense ? "dense" : "branch"},
          {"correction", s.base.correction_mode == CorrectionMode::IdealLogical ? "ideal" : "physical"},
          {"tau_rule", s.tau_rule == TauRule::QuarterAlphaSquared ? "pi/(4 alpha^2)" : "pi/(xi nbar)"},
          {"outcomes", describe(s.outcomes, s.base.variant)},
          {"alphas", s.alphas},
          {"betas", betas},
          {"xis", s.xis},
          {"readouts", s.readouts},
          {"losses", s.losses}};
}

int cmd_sweep(const SweepFlags& f, std::ostream& out, std::ostream& err) {
  SweepSpec spec = figure_preset(f.figure);
  apply_common(f.common, spec.base);
  if (f.xi_min || f.xi_max || f.xi_step) {
    if (spec.xis.empty()) fail(ErrorKind::InvalidConfig, "figure " + f.figure + " has no xi axis");
    spec.xis = linear_grid(f.xi_min.value_or(spec.xis.front()), f.xi_max.value_or(spec.xis.back()),
                           f.xi_step.value_or(0.01));
  }
  if (f.grid_step) {
    if (spec.kind != SweepKind::AlphaBeta) fail(ErrorKind::InvalidConfig, "--grid-step applies to alpha-beta maps");
    const auto g = linear_grid(3.0, 4.0, *f.grid_step);
    spec.alphas = g;
    spec.betas = spec.betas.front().imag() != 0.0 ? on_imaginary_axis(g) : on_real_axis(g);
  }
  if (f.loss_step) {
    if (spec.kind != SweepKind::Loss) fail(ErrorKind::InvalidConfig, "--loss-step applies to the loss figure");
    spec.losses = linear_grid(0.0, 0.5, *f.loss_step);
  }
  spec.validate();
  const std::string path = f.out.empty() ? "fig-" + f.figure + ".csv" : f.out;

  std::size_t rows = 0;
  if (spec.kind == SweepKind::Distribution) {
    const auto d = run_distribution(spec);
    rows = d.size();
    write_file(path, [&](std::ostream& s) { write_distribution(s, d); });
  } else {
    const auto r = run_sweep(spec, f.jobs);
    rows = r.size();
    write_file(path, [&](std::ostream& s) { write_results(s, r); });
    const auto best = std::max_element(r.begin(), r.end(), [](const ResultRow& a, const ResultRow& b) {
      return a.avg_fidelity.value_or(a.fidelity.value_or(0.0)) < b.avg_fidelity.value_or(b.fidelity.value_or(0.0));
    });
    if (best != r.end()) {
      out << "best " << std::setprecision(8) << best->avg_fidelity.value_or(best->fidelity.value_or(0.0))
          << " at " << result_line(*best) << "\n";
    }
  }
  update_manifest({path}, spec_json(spec));
  out << "wrote " << rows << " rows to " << path << "\n";

  if (f.oracle) {
    const auto rep = oracle_replay(spec);
    const double gap = std::max(rep.max_probability_gap, rep.max_fidelity_gap);
    err << "oracle: " << rep.points << " points, max gap " << gap << "\n";
    if (gap > 1e-8) {
      err << "FAILED dense-oracle-replay\n";
      return kValidateFailed;
    }
  }
  return kOk;
}

int cmd_validate(const ValidateFlags& f, std::ostream& out, std::ostream& err) {
  ValidateOptions opts;
  opts.level = f.level == "full" ? Level::Full : Level::Fast;
  if (f.fault_bs_sign) opts.dense_bs = BsConvention::Flipped;
  std::string first_failure;
  run_validation(opts, [&](const CheckResult& r) {
    out << (r.passed ? "ok     " : "FAILED ") << std::left << std::setw(24) << r.name << r.detail << " ("
        << std::fixed << std::setprecision(2) << r.seconds << " s)\n"
        << std::defaultfloat;
    if (!r.passed && first_failure.empty()) first_failure = r.name;
  });
  if (!first_failure.empty()) {
    err << "validation failed: " << first_failure << "\n";
    return kValidateFailed;
  }
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidConfig: return kInvalidConfig;
    case ErrorKind::CutoffTooSmall: return kCutoffTooSmall;
    default: return kValidateFailed;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Teleportation of cat-state qubits across three bosonic modes"};
  app.name("catport");
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.fallthrough();
  auto scoped = std::make_shared<ScopedConfig>();
  app.config_formatter(scoped);
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      scoped->scope = args[i];
      break;
    }
  }

  TeleportFlags tf;
  auto* tp = app.add_subcommand("teleport", "run one postselected teleportation");
  add_common(tp, tf.common);
  tp->add_option("--alpha", tf.alpha, "logical amplitude (real)")->capture_default_str();
  tp->add_option("--beta-re", tf.beta_re, "Re(beta)")->capture_default_str();
  tp->add_option("--beta-im", tf.beta_im, "Im(beta)")->capture_default_str();
  tp->add_option("--variant", tf.variant, "1: single-mode parities, 2: joint parity")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  auto* xi = tp->add_option("--xi", tf.xi, "tau = pi / (xi nbar)")->capture_default_str();
  tp->add_option("--tau", tf.tau, "explicit interaction time")->excludes(xi);
  tp->add_option("--kplus", tf.k_plus, "readouts reporting +")->capture_default_str();
  tp->add_option("--kminus", tf.k_minus, "readouts reporting -")->capture_default_str();
  tp->add_option("--outcomes", tf.outcomes,
                 "parity signs and optional readout sign (default +,+,+ or +,+ for variant 2)");
  tp->add_flag("--ideal-collapse", tf.ideal_collapse, "replace the readout by the exact coherent projection");
  tp->add_option("--cutoffs", tf.cutoffs, "n_max for modes a, b, c (default from the cutoff policy)")
      ->expected(3)
      ->delimiter(',');
  tp->add_option("--out", tf.out, "write the result row to this CSV");

  SweepFlags sf;
  auto* sw = app.add_subcommand("sweep", "run a figure preset and write its CSV");
  add_common(sw, sf.common);
  sw->add_option("--figure", sf.figure, "preset id")->required()->check(CLI::IsMember(figure_ids()));
  sw->add_option("--out", sf.out, "CSV path (default fig-<id>.csv)");
  sw->add_option("--jobs", sf.jobs, "worker threads, 0 = all cores")
      ->envname("CATPORT_JOBS")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sw->add_option("--xi-min", sf.xi_min, "xi grid start");
  sw->add_option("--xi-max", sf.xi_max, "xi grid end");
  sw->add_option("--xi-step", sf.xi_step, "xi grid step")->check(CLI::PositiveNumber);
  sw->add_option("--grid-step", sf.grid_step, "alpha and |beta| step on [3, 4]")->check(CLI::PositiveNumber);
  sw->add_option("--loss-step", sf.loss_step, "loss step on [0, 0.5]")->check(CLI::PositiveNumber);
  sw->add_flag("--oracle", sf.oracle, "replay a rescaled subsample on the dense engine");

  ValidateFlags vf;
  auto* va = app.add_subcommand("validate", "run the invariant suite");
  va->add_option("--level", vf.level, "fast or full")->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
  va->add_flag("--fault-bs-sign", vf.fault_bs_sign, "flip the dense beam-splitter sign (test hook)")
      ->group("");

  for (auto* sub : {tp, sw, va}) {
    sub->fallthrough();
    sub->allow_config_extras(CLI::config_extras_mode::error);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = e.get_exit_code();
    (code == 0 ? out : err) << (code == 0 ? app.help() : std::string(e.what()) + "\n");
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (tp->parsed()) return cmd_teleport(tf, out);
    if (sw->parsed()) return cmd_sweep(sf, out, err);
    return cmd_validate(vf, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidateFailed;
  }
}

}  // namespace catport::cli
