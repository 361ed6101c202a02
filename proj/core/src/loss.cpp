#include "catport/loss.hpp"

#include <cmath>

#include "catport/errors.hpp"

namespace catport {

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorKind::InvalidConfig, "transmissivity must lie in (0, 1]");
}

}  // namespace

DenseOp kraus_operator(double eta, int k, int n_max) {
  check_eta(eta);
  if (k < 0) fail(ErrorKind::InvalidConfig, "Kraus index must be non-negative");
  const int d = n_max + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  const double loss = 1.0 - eta;
  if (k == 0 || loss > 0.0) {
    const double log_eta = std::log(eta);
    const double log_loss = k > 0 ? std::log(loss) : 0.0;
    for (int n = k; n < d; ++n) {
      m(n - k, n) = std::exp(0.5 * log_binomial(n, k) + 0.5 * (n - k) * log_eta + 0.5 * k * log_loss);
    }
  }
  CoherentRule rule = [eta, loss, k](cplx label) {
    // A_k |g> = e^{-(1-eta)|g|^2/2} (sqrt(1-eta) g)^k / sqrt(k!) |sqrt(eta) g>
    cplx c = 1.0;
    if (k > 0) {
      if (loss == 0.0 || label == cplx{}) return std::vector<CoherentTerm>{};
      const double log_mag = k * (0.5 * std::log(loss) + std::log(std::abs(label))) - 0.5 * std::lgamma(k + 1.0);
      c = std::polar(std::exp(log_mag), k * std::arg(label));
    }
    c *= std::exp(-0.5 * loss * std::norm(label));
    return std::vector<CoherentTerm>{{c, std::sqrt(eta) * label}};
  };
  return DenseOp(std::move(m), std::move(rule));
}

LossChannel LossChannel::covering(double eta, int n_max) {
  check_eta(eta);
  LossChannel ch{eta, 0};
  if (eta == 1.0) return ch;
  // Level n keeps weight sum_{k <= K} C(n,k) eta^{n-k} (1-eta)^k; the top level
  // is the slowest to converge.
  const double log_eta = std::log(eta);
  const double log_loss = std::log(1.0 - eta);
  double covered = 0.0;
  for (int k = 0; k <= n_max; ++k) {
    covered += std::exp(log_binomial(n_max, k) + (n_max - k) * log_eta + k * log_loss);
    ch.k_max = k;
    if (covered > 1.0 - kKrausCoverage) break;
  }
  return ch;
}

double LossChannel::completeness_defect(int n_max, int inner_n_max) const {
  const int d = inner_n_max + 1;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k <= k_max; ++k) {
    const Eigen::MatrixXcd a = kraus_operator(eta, k, n_max).matrix().leftCols(d);
    sum += a.adjoint() * a;
  }
  return (sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

LossResult lossy_fidelity(const ProtocolConfig& cfg, double eta, const Outcomes& outcomes) {
  cfg.validate();
  check_eta(eta);
  if (cfg.variant != Variant::SingleParity) {
    fail(ErrorKind::InvalidConfig, "loss is modelled for the single-parity variant only");
  }
  const auto measured = measure_variant1(pre_measurement_state(cfg), outcomes.sigma_a, outcomes.sigma_b);
  LossResult out;
  if (eta == 1.0) {
    const auto r = finish_after_parity(measured.state, measured.probability, cfg, outcomes);
    return {r.fidelity, 1.0, 1};
  }
  const double norm = norm_squared(measured.state);
  const int n_a = cutoffs(measured.state)[0];
  for (int k = 0; k <= n_a && out.weight <= 1.0 - kKrausCoverage; ++k) {
    const State lossy = apply_mode_op(measured.state, Mode::A, kraus_operator(eta, k, n_a));
    const double p_k = norm_squared(lossy) / norm;
    ++out.kraus_terms;
    out.weight += p_k;
    if (!(p_k > 0.0)) continue;
    const auto readout = displaced_dispersive(lossy, cfg, outcomes.k_plus, outcomes.k_minus);
    if (!(readout.probability >= kImpossibleProbability)) continue;
    const auto r = finish_from_readout(readout, measured.probability, cfg, outcomes);
    out.fidelity += p_k * r.fidelity;
  }
  return out;
}

}  // namespace catport
