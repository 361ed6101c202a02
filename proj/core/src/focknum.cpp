#include "catport/focknum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catport/errors.hpp"

namespace catport {

char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

int cutoff_for_mean(double mean_occupation) {
  const double m = std::max(0.0, mean_occupation);
  return static_cast<int>(std::ceil(m + 8.0 * std::sqrt(m) + 20.0));
}

// ---------------------------------------------------------------- FockVector

FockVector::FockVector(std::vector<cplx> amps) : amps_(std::move(amps)) {}

FockVector FockVector::zeros(int n_max) {
  return FockVector(std::vector<cplx>(static_cast<size_t>(n_max + 1)));
}

FockVector FockVector::basis(int level, int n_max) {
  auto v = zeros(n_max);
  v.amps_.at(static_cast<size_t>(level)) = 1.0;
  return v;
}

double FockVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double FockVector::tail_weight(int levels) const {
  double s = 0.0;
  const int start = std::max(0, size() - levels);
  for (int n = start; n < size(); ++n) s += std::norm(amps_[n]);
  return s;
}

double FockVector::mean_occupation() const {
  double s = 0.0;
  for (int n = 0; n < size(); ++n) s += n * std::norm(amps_[n]);
  return s;
}

FockVector FockVector::resized(int n_max) const {
  std::vector<cplx> out(static_cast<size_t>(n_max + 1));
  std::copy_n(amps_.begin(), std::min(amps_.size(), out.size()), out.begin());
  return FockVector(std::move(out));
}

FockVector FockVector::normalized() const {
  const double n2 = norm_squared();
  if (n2 <= 0.0) fail(ErrorKind::ZeroNormState, "cannot normalize a zero vector");
  return cplx(1.0 / std::sqrt(n2)) * *this;
}

FockVector& FockVector::operator*=(cplx s) {
  for (auto& a : amps_) a *= s;
  return *this;
}

FockVector& FockVector::operator+=(const FockVector& other) {
  if (other.size() > size()) amps_.resize(other.amps_.size());
  for (int n = 0; n < other.size(); ++n) amps_[n] += other.amps_[n];
  return *this;
}

FockVector operator*(cplx s, FockVector v) {
  v *= s;
  return v;
}

FockVector operator+(FockVector a, const FockVector& b) {
  a += b;
  return a;
}

FockVector operator-(FockVector a, const FockVector& b) {
  a += cplx(-1.0) * b;
  return a;
}

cplx inner(const FockVector& bra, const FockVector& ket) {
  const int n = std::min(bra.size(), ket.size());
  cplx s{};
  for (int i = 0; i < n; ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

double fidelity(const FockVector& a, const FockVector& b) {
  const double na = a.norm_squared();
  const double nb = b.norm_squared();
  if (na <= 0.0 || nb <= 0.0) fail(ErrorKind::ZeroNormState, "fidelity of a zero vector");
  return std::norm(inner(a, b)) / (na * nb);
}

// ---------------------------------------------------------------- operators

namespace {

// Components of v beyond an operator's cutoff must be negligible; they are
// dropped.
void check_fits(const FockVector& v, int op_n_max) {
  if (v.n_max() <= op_n_max) return;
  double outside = 0.0;
  for (int n = op_n_max + 1; n <= v.n_max(); ++n) outside += std::norm(v[n]);
  if (outside > kLeakThreshold) {
    fail(ErrorKind::CutoffTooSmall,
         "vector with weight " + std::to_string(outside) + " above level " +
             std::to_string(op_n_max) + " does not fit the operator");
  }
}

}  // namespace

DiagonalOp::DiagonalOp(std::vector<cplx> diag, CoherentRule rule)
    : diag_(std::move(diag)), rule_(std::move(rule)) {}

FockVector DiagonalOp::apply(const FockVector& v) const {
  check_fits(v, n_max());
  std::vector<cplx> out(static_cast<size_t>(std::min(v.n_max(), n_max()) + 1));
  for (size_t n = 0; n < out.size(); ++n) out[n] = diag_[n] * v[static_cast<int>(n)];
  return FockVector(std::move(out));
}

DiagonalOp DiagonalOp::compose(const DiagonalOp& rhs) const {
  const size_t n = std::min(diag_.size(), rhs.diag_.size());
  std::vector<cplx> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = diag_[i] * rhs.diag_[i];
  CoherentRule rule;
  if (rule_ && rhs.rule_) {
    rule = [outer = rule_, first = rhs.rule_](cplx label) {
      std::vector<CoherentTerm> out;
      for (const auto& t1 : first(label)) {
        for (const auto& t2 : outer(t1.label)) out.push_back({t1.coeff * t2.coeff, t2.label});
      }
      return out;
    };
  }
  return DiagonalOp(std::move(d), std::move(rule));
}

DiagonalOp DiagonalOp::adjoint() const {
  std::vector<cplx> d(diag_.size());
  std::transform(diag_.begin(), diag_.end(), d.begin(), [](cplx x) { return std::conj(x); });
  return DiagonalOp(std::move(d));
}

DenseOp::DenseOp(Eigen::MatrixXcd matrix, CoherentRule rule)
    : matrix_(std::move(matrix)), rule_(std::move(rule)) {}

FockVector DenseOp::apply(const FockVector& v) const {
  check_fits(v, static_cast<int>(matrix_.cols()) - 1);
  Eigen::VectorXcd in = Eigen::VectorXcd::Zero(matrix_.cols());
  for (int n = 0; n < std::min<int>(v.size(), static_cast<int>(matrix_.cols())); ++n) in(n) = v[n];
  Eigen::VectorXcd out = matrix_ * in;
  return FockVector(std::vector<cplx>(out.data(), out.data() + out.size()));
}

DenseOp DenseOp::compose(const DenseOp& rhs) const {
  const Eigen::Index n = std::min(matrix_.cols(), rhs.matrix_.rows());
  return DenseOp(matrix_.leftCols(n) * rhs.matrix_.topRows(n));
}

DenseOp DenseOp::adjoint() const { return DenseOp(matrix_.adjoint()); }

double DenseOp::unitarity_defect(int inner_n_max) const {
  const Eigen::Index k = std::min<Eigen::Index>(inner_n_max + 1, matrix_.cols());
  Eigen::MatrixXcd g = matrix_.leftCols(k).adjoint() * matrix_.leftCols(k);
  g -= Eigen::MatrixXcd::Identity(k, k);
  return g.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- constructors

FockVector coherent_vector_unchecked(cplx gamma, int n_max) {
  std::vector<cplx> amps(static_cast<size_t>(n_max + 1));
  // Running product g^n / sqrt(n!) kept at unit scale; the exponent lives in
  // log_scale so neither factor over- or underflows.
  double log_scale = -0.5 * std::norm(gamma);
  cplx running = 1.0;
  amps[0] = std::exp(log_scale);
  for (int n = 1; n <= n_max; ++n) {
    running *= gamma / std::sqrt(static_cast<double>(n));
    const double mag = std::abs(running);
    if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
      log_scale += std::log(mag);
      running /= mag;
    }
    amps[n] = running * std::exp(log_scale);
  }
  return FockVector(std::move(amps));
}

FockVector coherent_vector(cplx gamma, int n_max) {
  auto v = coherent_vector_unchecked(gamma, n_max);
  if (v.tail_weight() >= kLeakThreshold) {
    fail(ErrorKind::CutoffTooSmall, "coherent state with |gamma|^2=" +
                                        std::to_string(std::norm(gamma)) +
                                        " leaks at n_max=" + std::to_string(n_max));
  }
  return v;
}

double cat_norm_factor(cplx gamma, int bit) {
  const double x = -2.0 * std::norm(gamma);
  // 1 + e^x and 1 - e^x = -expm1(x), the latter accurate for small |gamma|.
  return bit == 0 ? std::sqrt(2.0 * (1.0 + std::exp(x))) : std::sqrt(-2.0 * std::expm1(x));
}

FockVector cat_vector(cplx gamma, int bit, int n_max) {
  if (bit != 0 && bit != 1) fail(ErrorKind::InvalidConfig, "logical bit must be 0 or 1");
  const double norm = cat_norm_factor(gamma, bit);
  if (norm == 0.0) fail(ErrorKind::InvalidConfig, "odd cat with zero amplitude is undefined");
  auto coh = coherent_vector(gamma, n_max);
  std::vector<cplx> amps(static_cast<size_t>(n_max + 1));
  for (int n = bit; n <= n_max; n += 2) amps[n] = 2.0 * coh[n] / norm;
  return FockVector(std::move(amps));
}

FockVector logical_vector(const LogicalLabel& label, int n_max) {
  return cat_vector(label.amplitude, label.bit, n_max);
}

DenseOp displacement(cplx gamma, int n_max) {
  // The vacuum column must fit; larger states are the caller's cutoff budget.
  (void)coherent_vector(gamma, n_max);
  const int dim = n_max + 1;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  const double x = std::norm(gamma);
  if (x == 0.0) {
    d.setIdentity();
  } else {
    // <m|D|n> = e^{-x/2} sqrt(n!/m!) gamma^k L_n^(k)(x) for m = n + k, and the
    // mirrored form with -conj(gamma) above the diagonal. L is run up the
    // degree by its three-term recurrence, rescaled to stay in range.
    const double log_abs = std::log(std::abs(gamma));
    const double arg = std::arg(gamma);
    for (int k = 0; k < dim; ++k) {
      double l_prev = 0.0;
      double l_cur = 1.0;
      double log_scale = 0.0;
      for (int j = 0; j + k < dim; ++j) {
        if (j > 0) {
          const double l_next = ((2.0 * j - 1.0 + k - x) * l_cur - (j - 1.0 + k) * l_prev) / j;
          l_prev = l_cur;
          l_cur = l_next;
          if (std::abs(l_cur) > 1e150) {
            l_prev *= 1e-150;
            l_cur *= 1e-150;
            log_scale += 150.0 * std::log(10.0);
          }
        }
        const double log_mag = -0.5 * x + 0.5 * (std::lgamma(j + 1.0) - std::lgamma(j + k + 1.0)) +
                               k * log_abs + log_scale;
        const double mag = l_cur * std::exp(log_mag);
        d(j + k, j) = std::polar(mag, k * arg);
        // -conj(gamma) = |gamma| e^{i (pi - arg)}
        if (k > 0) d(j, j + k) = std::polar(mag, k * (kPi - arg));
      }
    }
  }
  CoherentRule rule = [gamma](cplx label) {
    // D(d)|g> = e^{i Im(d conj(g))} |g + d>
    const double phase = std::imag(gamma * std::conj(label));
    return std::vector<CoherentTerm>{{std::polar(1.0, phase), label + gamma}};
  };
  return DenseOp(std::move(d), std::move(rule));
}

DiagonalOp parity_projector(Sign sigma, int n_max) {
  const int keep = sigma == Sign::Plus ? 0 : 1;
  std::vector<cplx> d(static_cast<size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) d[n] = (n % 2 == keep) ? 1.0 : 0.0;
  const double s = sign_value(sigma);
  CoherentRule rule = [s](cplx label) {
    return std::vector<CoherentTerm>{{0.5, label}, {0.5 * s, -label}};
  };
  return DiagonalOp(std::move(d), std::move(rule));
}

DiagonalOp parity_operator(int n_max) {
  std::vector<cplx> d(static_cast<size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) d[n] = (n % 2 == 0) ? 1.0 : -1.0;
  CoherentRule rule = [](cplx label) { return std::vector<CoherentTerm>{{1.0, -label}}; };
  return DiagonalOp(std::move(d), std::move(rule));
}

DiagonalOp phase_rotation(double theta, int n_max) {
  std::vector<cplx> d(static_cast<size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) d[n] = std::polar(1.0, -theta * n);
  CoherentRule rule = [theta](cplx label) {
    return std::vector<CoherentTerm>{{1.0, label * std::polar(1.0, -theta)}};
  };
  return DiagonalOp(std::move(d), std::move(rule));
}

DiagonalOp logical_z(int n_max) { return parity_operator(n_max); }

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

DiagonalOp dispersive_operator(double tau, int k_plus, int k_minus, int n_max) {
  if (k_plus < 0 || k_minus < 0) {
    fail(ErrorKind::InvalidConfig, "dispersive outcome counts must be non-negative");
  }
  const int total = k_plus + k_minus;
  const double log_prefactor = 0.5 * log_binomial(total, k_plus);
  std::vector<cplx> d(static_cast<size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    const double c = std::cos(n * tau);
    const double s = std::sin(n * tau);
    if ((k_plus > 0 && c == 0.0) || (k_minus > 0 && s == 0.0)) {
      d[n] = 0.0;
      continue;
    }
    double log_mag = log_prefactor;
    double sign = 1.0;
    if (k_plus > 0) {
      log_mag += k_plus * std::log(std::abs(c));
      if (c < 0.0 && k_plus % 2 == 1) sign = -sign;
    }
    if (k_minus > 0) {
      log_mag += k_minus * std::log(std::abs(s));
      if (s < 0.0 && k_minus % 2 == 1) sign = -sign;
    }
    d[n] = sign * std::exp(log_mag);
  }
  return DiagonalOp(std::move(d));
}

double gaussian_peak_center(int k_plus, int k_minus) {
  const int total = k_plus + k_minus;
  if (total < 1) fail(ErrorKind::InvalidConfig, "peak center needs at least one readout");
  const double ratio = static_cast<double>(k_plus - k_minus) / total;
  return 0.5 * std::acos(std::clamp(ratio, -1.0, 1.0));
}

double optimal_tau(cplx alpha, cplx beta, double xi) {
  if (!(xi > 0.0)) fail(ErrorKind::InvalidConfig, "xi must be positive");
  const double nbar = std::norm(alpha) + std::norm(beta);
  if (nbar <= 0.0) fail(ErrorKind::InvalidConfig, "mean boson number must be positive");
  return kPi / (xi * nbar);
}

cplx coherent_overlap(cplx g1, cplx g2) {
  return std::exp(-0.5 * std::norm(g1) - 0.5 * std::norm(g2) + std::conj(g1) * g2);
}

}  // namespace catport
