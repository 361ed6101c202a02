#include "catport/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "catport/errors.hpp"

namespace catport {

namespace {

constexpr double kImpossible = kImpossibleProbability;
constexpr double kXFailure = 1e-6;

double tiny_relative(cplx z) { return 1e-12 * std::max(1.0, std::abs(z)); }

bool real_or_imaginary(cplx z) {
  return std::abs(z.imag()) <= tiny_relative(z) || std::abs(z.real()) <= tiny_relative(z);
}

BranchState coherent_branches(Dims n, const std::vector<std::pair<cplx, cplx>>& a,
                              const std::vector<std::pair<cplx, cplx>>& b,
                              const std::vector<std::pair<cplx, cplx>>& c) {
  BranchState s(n);
  for (const auto& [wa, ga] : a)
    for (const auto& [wb, gb] : b)
      for (const auto& [wc, gc] : c) {
        Branch br;
        br.coeff = wa * wb * wc;
        br.factors = {CoherentFactor{ga}, CoherentFactor{gb}, CoherentFactor{gc}};
        s.add(std::move(br));
      }
  return s;
}

// |bit_L>_g as two weighted coherent labels.
std::vector<std::pair<cplx, cplx>> logical_terms(int bit, cplx g) {
  const double n = cat_norm_factor(g, bit);
  if (n == 0.0) fail(ErrorKind::InvalidConfig, "logical state with zero amplitude");
  return {{1.0 / n, g}, {(bit == 0 ? 1.0 : -1.0) / n, -g}};
}

std::vector<std::pair<cplx, cplx>> superposed(cplx c0, cplx c1, cplx g) {
  std::vector<std::pair<cplx, cplx>> out;
  for (auto [w, l] : logical_terms(0, g)) out.emplace_back(c0 * w, l);
  for (auto [w, l] : logical_terms(1, g)) out.emplace_back(c1 * w, l);
  return out;
}

StageResult checked(State s, double before, const char* what) {
  const double after = norm_squared(s);
  const double p = before > 0.0 ? after / before : 0.0;
  if (!(p >= kImpossible)) {
    fail(ErrorKind::ImpossibleOutcome, std::string(what) + " outcome has probability " + std::to_string(p));
  }
  return {std::move(s), p};
}

// Fold n tau into [0, pi/2], where the readout envelope |cos|^k+ |sin|^k- peaks.
double folded_phase(double n, double tau) {
  double phi = std::fmod(n * tau, kPi);
  if (phi > kPi / 2.0) phi = kPi - phi;
  return phi;
}

DenseOp ideal_logical_x(cplx beta, int n_max) {
  const auto c0 = cat_vector(beta, 0, n_max);
  const auto c1 = cat_vector(beta, 1, n_max);
  const int d = n_max + 1;
  Eigen::VectorXcd v0(d), v1(d);
  for (int n = 0; n < d; ++n) {
    v0(n) = c0[n];
    v1(n) = c1[n];
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
  m += v1 * v0.adjoint() + v0 * v1.adjoint() - v0 * v0.adjoint() - v1 * v1.adjoint();
  const double n0 = cat_norm_factor(beta, 0);
  const double n1 = cat_norm_factor(beta, 1);
  const double s = 0.5 * (n0 / n1 + n1 / n0);
  const double t = 0.5 * (n0 / n1 - n1 / n0);
  CoherentRule rule = [beta, s, t](cplx label) {
    if (std::abs(label - beta) <= kMergeTolerance) {
      return std::vector<CoherentTerm>{{s, beta}, {-t, -beta}};
    }
    if (std::abs(label + beta) <= kMergeTolerance) {
      return std::vector<CoherentTerm>{{t, beta}, {-s, -beta}};
    }
    fail(ErrorKind::UnsupportedRepresentation, "logical X on a label outside {beta, -beta}");
  };
  return DenseOp(std::move(m), std::move(rule));
}

State apply_x(const State& state, const ProtocolConfig& cfg, double& failure_weight) {
  const int n_c = cutoffs(state)[2];
  if (cfg.correction_mode == CorrectionMode::IdealLogical) {
    return apply_mode_op(state, Mode::C, ideal_logical_x(cfg.beta, n_c));
  }
  // D(-beta) M+ D(beta): the |2 beta> peak picks up cos(pi) = -1, the vacuum
  // peak is untouched.
  const double tau_x = kPi / (4.0 * std::norm(cfg.beta));
  const State shifted = apply_mode_op(state, Mode::C, displacement(cfg.beta, n_c));
  const double before = norm_squared(shifted);
  const State kept = apply_mode_op(shifted, Mode::C, dispersive_operator(tau_x, 1, 0, n_c));
  const double ratio = norm_squared(kept) / before;
  if (!(ratio >= kXFailure)) {
    fail(ErrorKind::XCorrectionFailed, "X correction readout weight " + std::to_string(ratio));
  }
  failure_weight = 1.0 - ratio;
  return scaled(apply_mode_op(kept, Mode::C, displacement(-cfg.beta, n_c)), 1.0 / std::sqrt(ratio));
}

}  // namespace

TeleportResult finish_from_readout(const StageResult& readout, double measurement_probability,
                                   const ProtocolConfig& cfg, const Outcomes& outcomes) {
  TeleportResult r;
  r.outcomes = outcomes;
  r.tau = cfg.resolved_tau();
  r.sigma_a_prime = classify_readout(cfg, outcomes.k_plus, outcomes.k_minus);
  r.correction = correction_for(cfg.variant, outcomes, r.sigma_a_prime);
  r.measurement_probability = measurement_probability;
  r.conditional_probability = readout.probability;
  r.joint_probability = measurement_probability * readout.probability;
  const auto corrected = apply_correction(readout.state, r.correction, cfg);
  r.x_failure_weight = corrected.x_failure_weight;
  r.branch_count = branch_count(corrected.state);
  r.leakage = leakage(corrected.state);
  r.reduced = reduced_c(corrected.state);
  r.fidelity = fidelity_c(r.reduced, target_state(cfg, cutoffs(corrected.state)[2]));
  return r;
}

const char* to_string(Correction c) {
  switch (c) {
    case Correction::I: return "I";
    case Correction::Z: return "Z";
    case Correction::X: return "X";
    case Correction::XZ: return "XZ";
  }
  return "?";
}

// ---------------------------------------------------------------- config

void ProtocolConfig::validate() const {
  const double norm = std::norm(mu) + std::norm(nu);
  if (std::abs(norm - 1.0) > 1e-12) {
    fail(ErrorKind::InvalidConfig, "|mu|^2 + |nu|^2 must be 1 (got " + std::to_string(norm) + ")");
  }
  if (alpha == cplx{}) fail(ErrorKind::InvalidConfig, "alpha must be nonzero (degenerate logical basis)");
  if (beta == cplx{}) fail(ErrorKind::InvalidConfig, "beta must be nonzero (degenerate logical basis)");
  if (tau) {
    if (!(std::isfinite(*tau) && *tau > 0.0)) fail(ErrorKind::InvalidConfig, "tau must be positive");
  } else if (!(std::isfinite(xi) && xi > 0.0)) {
    fail(ErrorKind::InvalidConfig, "xi must be positive");
  }
  if (k_plus < 0 || k_minus < 0) fail(ErrorKind::InvalidConfig, "readout counts must be non-negative");
  if (readouts() < 1) fail(ErrorKind::InvalidConfig, "at least one readout is required");
  if (correction_mode == CorrectionMode::Physical && !real_or_imaginary(beta)) {
    fail(ErrorKind::InvalidConfig, "physical corrections need a real or purely imaginary beta");
  }
  if (cutoffs) {
    for (int c : *cutoffs) {
      if (c < 1) fail(ErrorKind::InvalidConfig, "cutoffs must be at least 1");
    }
  }
}

double ProtocolConfig::resolved_tau() const { return tau ? *tau : optimal_tau(alpha, beta, xi); }

Dims ProtocolConfig::resolved_cutoffs() const {
  if (cutoffs) return *cutoffs;
  const double sum = std::abs(alpha) + std::abs(beta);
  const double b2 = std::norm(beta);
  return {cutoff_for_mean(2.0 * sum * sum), cutoff_for_mean(std::max(2.0 * b2, 0.5 * sum * sum)),
          cutoff_for_mean(4.0 * b2)};
}

cplx ProtocolConfig::chi() const { return (alpha + beta) / std::sqrt(2.0); }
cplx ProtocolConfig::chi_bar() const { return (alpha - beta) / std::sqrt(2.0); }

Outcomes default_outcomes(const ProtocolConfig& cfg) {
  Outcomes o;
  o.k_plus = cfg.k_plus;
  o.k_minus = cfg.k_minus;
  return o;
}

std::string describe(const Outcomes& o, Variant v) {
  std::ostringstream s;
  if (v == Variant::SingleParity) {
    s << sign_char(o.sigma_a) << sign_char(o.sigma_b);
  } else {
    s << sign_char(o.sigma_ab);
  }
  if (o.k_plus + o.k_minus == 1) {
    s << (o.k_plus == 1 ? '+' : '-');
  } else {
    s << ':' << o.k_plus << '/' << o.k_minus;
  }
  return s.str();
}

// ---------------------------------------------------------------- pipeline

State prepare_initial(const ProtocolConfig& cfg) {
  cfg.validate();
  const Dims n = cfg.resolved_cutoffs();
  const cplx b0 = std::sqrt(2.0) * cfg.beta;
  if (cfg.engine == Engine::Dense) {
    const auto a = cfg.mu * cat_vector(cfg.alpha, 0, n[0]) + cfg.nu * cat_vector(cfg.alpha, 1, n[0]);
    return DenseState::product(a, cat_vector(b0, 0, n[1]), FockVector::basis(0, n[2]));
  }
  // leak-check the largest labels each mode starts with
  (void)coherent_vector(cfg.alpha, n[0]);
  (void)coherent_vector(b0, n[1]);
  const double nb = 1.0 / cat_norm_factor(b0, 0);
  return prune(coherent_branches(n, superposed(cfg.mu, cfg.nu, cfg.alpha), {{nb, b0}, {nb, -b0}},
                                 {{1.0, 0.0}}));
}

State entangle_resource(const State& state, const ProtocolConfig& cfg) {
  return apply_bs(state, {Mode::B, Mode::C}, cfg.bs_convention);
}

State second_bs(const State& state, const ProtocolConfig& cfg) {
  return apply_bs(state, {Mode::A, Mode::B}, cfg.bs_convention);
}

State pre_measurement_state(const ProtocolConfig& cfg) {
  return second_bs(entangle_resource(prepare_initial(cfg), cfg), cfg);
}

StageResult measure_variant1(const State& state, Sign sigma_a, Sign sigma_b) {
  const auto& n = cutoffs(state);
  State s = apply_mode_op(state, Mode::A, parity_projector(sigma_a, n[0]));
  s = prune(apply_mode_op(s, Mode::B, parity_projector(sigma_b, n[1])));
  return checked(std::move(s), norm_squared(state), "parity");
}

StageResult measure_variant2(const State& state, Sign sigma_ab) {
  return checked(prune(apply_joint_parity(state, sigma_ab)), norm_squared(state), "joint parity");
}

StageResult measure_parity(const State& state, const ProtocolConfig& cfg, const Outcomes& o) {
  return cfg.variant == Variant::SingleParity ? measure_variant1(state, o.sigma_a, o.sigma_b)
                                              : measure_variant2(state, o.sigma_ab);
}

StageResult displaced_dispersive(const State& state, const ProtocolConfig& cfg, int k_plus,
                                 int k_minus) {
  const int n_a = cutoffs(state)[0];
  const cplx chi = cfg.chi();
  const State shifted = apply_mode_op(state, Mode::A, displacement(chi, n_a));
  State out = [&] {
    if (!cfg.ideal_collapse) {
      return apply_mode_op(shifted, Mode::A, dispersive_operator(cfg.resolved_tau(), k_plus, k_minus, n_a));
    }
    const cplx chib = cfg.chi_bar();
    const std::vector<cplx> labels = classify_readout(cfg, k_plus, k_minus) == Sign::Plus
                                         ? std::vector<cplx>{2.0 * chi, 0.0}
                                         : std::vector<cplx>{chi + chib, chi - chib};
    return prune(apply_mode_op(shifted, Mode::A, coherent_span_projector(labels, n_a)));
  }();
  const double before = norm_squared(state);
  const double after = norm_squared(out);
  return {std::move(out), before > 0.0 ? after / before : 0.0};
}

Sign classify_readout(const ProtocolConfig& cfg, int k_plus, int k_minus) {
  if (k_plus + k_minus == 1) return k_plus == 1 ? Sign::Plus : Sign::Minus;
  const double x = gaussian_peak_center(k_plus, k_minus);
  const double tau = cfg.resolved_tau();
  const cplx chi = cfg.chi();
  const cplx chib = cfg.chi_bar();
  auto distance = [&](std::initializer_list<cplx> labels) {
    double d = kPi;
    for (cplx g : labels) d = std::min(d, std::abs(folded_phase(std::norm(g), tau) - x));
    return d;
  };
  const double d_chi = distance({0.0, 2.0 * chi});
  const double d_bar = distance({chi + chib, chi - chib});
  return d_chi <= d_bar ? Sign::Plus : Sign::Minus;
}

Correction correction_for(Variant variant, const Outcomes& o, Sign sigma_a_prime) {
  const bool x = variant == Variant::SingleParity ? o.sigma_a != o.sigma_b : o.sigma_ab == Sign::Minus;
  const bool z = sigma_a_prime == Sign::Minus;
  if (x && z) return Correction::XZ;
  if (x) return Correction::X;
  if (z) return Correction::Z;
  return Correction::I;
}

CorrectionResult apply_correction(const State& state, Correction correction, const ProtocolConfig& cfg) {
  CorrectionResult r{state, 0.0};
  if (correction == Correction::I) return r;
  const int n_c = cutoffs(state)[2];
  if (correction == Correction::Z || correction == Correction::XZ) {
    r.state = apply_mode_op(r.state, Mode::C, logical_z(n_c));
  }
  if (correction == Correction::X || correction == Correction::XZ) {
    r.state = apply_x(r.state, cfg, r.x_failure_weight);
  }
  return r;
}

FockVector target_state(const ProtocolConfig& cfg, int n_max) {
  return cfg.mu * cat_vector(cfg.beta, 0, n_max) + cfg.nu * cat_vector(cfg.beta, 1, n_max);
}

TeleportResult finish_after_parity(const State& measured, double measurement_probability,
                                   const ProtocolConfig& cfg, const Outcomes& outcomes) {
  auto readout = displaced_dispersive(measured, cfg, outcomes.k_plus, outcomes.k_minus);
  if (!(readout.probability >= kImpossible)) {
    fail(ErrorKind::ImpossibleOutcome,
         "readout " + describe(outcomes, cfg.variant) + " has probability " + std::to_string(readout.probability));
  }
  return finish_from_readout(readout, measurement_probability, cfg, outcomes);
}

TeleportResult teleport(const ProtocolConfig& cfg, const Outcomes& outcomes) {
  cfg.validate();
  if (outcomes.k_plus < 0 || outcomes.k_minus < 0 || outcomes.k_plus + outcomes.k_minus < 1) {
    fail(ErrorKind::InvalidConfig, "readout record needs non-negative counts with N >= 1");
  }
  const auto measured = measure_parity(pre_measurement_state(cfg), cfg, outcomes);
  return finish_after_parity(measured.state, measured.probability, cfg, outcomes);
}

TeleportResult teleport(const ProtocolConfig& cfg) { return teleport(cfg, default_outcomes(cfg)); }

namespace {

AverageResult average_over_readouts(const StageResult& measured, const ProtocolConfig& cfg,
                                    Outcomes o) {
  AverageResult avg;
  const int total = cfg.readouts();
  for (int kp = 0; kp <= total; ++kp) {
    o.k_plus = kp;
    o.k_minus = total - kp;
    const auto readout = displaced_dispersive(measured.state, cfg, o.k_plus, o.k_minus);
    avg.weight += readout.probability;
    if (!(readout.probability >= kImpossible)) continue;
    const auto r = finish_from_readout(readout, measured.probability, cfg, o);
    avg.fidelity += r.fidelity * readout.probability;
    ++avg.outcomes_used;
  }
  return avg;
}

}  // namespace

AverageResult average_fidelity(const ProtocolConfig& cfg, Sign sigma_a, Sign sigma_b) {
  cfg.validate();
  if (cfg.variant != Variant::SingleParity) {
    fail(ErrorKind::InvalidConfig, "average_fidelity takes the single-parity variant");
  }
  Outcomes o;
  o.sigma_a = sigma_a;
  o.sigma_b = sigma_b;
  const auto measured = measure_variant1(pre_measurement_state(cfg), sigma_a, sigma_b);
  return average_over_readouts(measured, cfg, o);
}

AverageResult average_fidelity_joint(const ProtocolConfig& cfg, Sign sigma_ab) {
  cfg.validate();
  if (cfg.variant != Variant::JointParity) {
    fail(ErrorKind::InvalidConfig, "average_fidelity_joint takes the joint-parity variant");
  }
  Outcomes o;
  o.sigma_ab = sigma_ab;
  const auto measured = measure_variant2(pre_measurement_state(cfg), sigma_ab);
  return average_over_readouts(measured, cfg, o);
}

BranchState idealized_expansion(const ProtocolConfig& cfg) {
  cfg.validate();
  const cplx chi = cfg.chi();
  const cplx chib = cfg.chi_bar();
  if (std::abs(chi) < 1e-12 || std::abs(chib) < 1e-12) {
    fail(ErrorKind::InvalidConfig, "logical expansion needs nonzero chi and chi-bar");
  }
  const Dims n = cfg.resolved_cutoffs();
  const cplx mu = cfg.mu;
  const cplx nu = cfg.nu;
  const cplx b = cfg.beta;
  BranchState out(n);
  auto add = [&](int bit_a, cplx ga, int bit_b, cplx gb, cplx c0, cplx c1) {
    out = out + coherent_branches(n, logical_terms(bit_a, ga), logical_terms(bit_b, gb), superposed(c0, c1, b));
  };
  add(0, chi, 0, chib, mu, nu);
  add(1, chi, 1, chib, mu, nu);
  add(0, chib, 0, chi, mu, -nu);
  add(1, chib, 1, chi, mu, -nu);
  add(0, chi, 1, chib, nu, mu);
  add(1, chi, 0, chib, nu, mu);
  add(0, chib, 1, chi, nu, -mu);
  add(1, chib, 0, chi, nu, -mu);
  out *= 1.0 / (2.0 * std::sqrt(2.0));
  return prune_branches(out);
}

double approximation_fidelity(const ProtocolConfig& cfg) {
  return fidelity(pre_measurement_state(cfg), State(idealized_expansion(cfg)));
}

Outcomes sample_outcomes(const ProtocolConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const State pre = pre_measurement_state(cfg);
  std::vector<Outcomes> parity;
  std::vector<StageResult> measured;
  std::vector<double> weights;
  for (Sign s1 : {Sign::Plus, Sign::Minus}) {
    for (Sign s2 : {Sign::Plus, Sign::Minus}) {
      if (cfg.variant == Variant::JointParity && s2 == Sign::Minus) continue;
      Outcomes o;
      o.sigma_a = s1;
      o.sigma_b = s2;
      o.sigma_ab = s1;
      try {
        measured.push_back(measure_parity(pre, cfg, o));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ImpossibleOutcome) throw;
        continue;
      }
      parity.push_back(o);
      weights.push_back(measured.back().probability);
    }
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const std::size_t i = pick(rng);
  Outcomes o = parity[i];
  const int total = cfg.readouts();
  std::vector<double> readout_weights;
  for (int kp = 0; kp <= total; ++kp) {
    readout_weights.push_back(displaced_dispersive(measured[i].state, cfg, kp, total - kp).probability);
  }
  std::discrete_distribution<int> pick_k(readout_weights.begin(), readout_weights.end());
  o.k_plus = pick_k(rng);
  o.k_minus = total - o.k_plus;
  return o;
}

DenseOp coherent_span_projector(const std::vector<cplx>& labels, int n_max) {
  std::vector<cplx> distinct;
  for (cplx g : labels) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](cplx h) { return std::abs(g - h) <= kMergeTolerance; });
    if (!seen) distinct.push_back(g);
  }
  const auto k = static_cast<Eigen::Index>(distinct.size());
  const int d = n_max + 1;
  Eigen::MatrixXcd e(d, k);
  Eigen::MatrixXcd s(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto v = coherent_vector(distinct[i], n_max);
    for (int n = 0; n < d; ++n) e(n, i) = v[n];
    for (Eigen::Index j = 0; j < k; ++j) s(i, j) = coherent_overlap(distinct[i], distinct[j]);
  }
  const Eigen::MatrixXcd s_inv = s.inverse();
  Eigen::MatrixXcd p = e * s_inv * e.adjoint();
  CoherentRule rule = [distinct, s_inv](cplx label) {
    const auto k = static_cast<Eigen::Index>(distinct.size());
    Eigen::VectorXcd v(k);
    for (Eigen::Index j = 0; j < k; ++j) v(j) = coherent_overlap(distinct[j], label);
    const Eigen::VectorXcd c = s_inv * v;
    std::vector<CoherentTerm> out;
    for (Eigen::Index i = 0; i < k; ++i) out.push_back({c(i), distinct[i]});
    return out;
  };
  return DenseOp(std::move(p), std::move(rule));
}

}  // namespace catport
