#include "catport/dense_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catport/errors.hpp"

namespace catport {

namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Views the tensor as [pre][d][post] around one mode.
struct ModeView {
  std::size_t pre = 1;
  std::size_t d = 1;
  std::size_t post = 1;
};

ModeView view_of(const Dims& n_max, Mode m) {
  ModeView v;
  const int k = index_of(m);
  for (int i = 0; i < 3; ++i) {
    const auto di = static_cast<std::size_t>(n_max[i] + 1);
    if (i < k) v.pre *= di;
    if (i == k) v.d = di;
    if (i > k) v.post *= di;
  }
  return v;
}

std::array<std::size_t, 3> strides_of(const Dims& n_max) {
  const auto dc = static_cast<std::size_t>(n_max[2] + 1);
  const auto db = static_cast<std::size_t>(n_max[1] + 1);
  return {db * dc, dc, 1};
}

// Block inputs below this weight are dropped rather than rotated.
constexpr double kBlockSkipWeight = 1e-40;

}  // namespace

char mode_char(Mode m) { return "abc"[index_of(m)]; }

std::pair<cplx, cplx> bs_labels(cplx g1, cplx g2) {
  const double s = 1.0 / std::sqrt(2.0);
  return {s * (g1 + g2), s * (g1 - g2)};
}

Eigen::MatrixXd bs_block(int total, BsConvention convention) {
  const int n = total + 1;
  if (total == 0) return Eigen::MatrixXd::Ones(1, 1);
  // exp(theta (a^dag b - a b^dag)) restricted to the block is
  // D exp(-i theta T) D^dag with T real symmetric tridiagonal and D = diag(i^k).
  const double theta = convention == BsConvention::Standard ? -kPi / 4.0 : kPi / 4.0;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 0; k + 1 < n; ++k) sub(k) = std::sqrt(static_cast<double>((k + 1) * (total - k)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd phases(n);
  for (int l = 0; l < n; ++l) phases(l) = std::polar(1.0, -theta * es.eigenvalues()(l));
  const Eigen::MatrixXcd inner = v.cast<cplx>() * phases.asDiagonal() * v.transpose().cast<cplx>();
  static const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Eigen::MatrixXd u(n, n);
  for (int m = 0; m < n; ++m) {
    for (int c = 0; c < n; ++c) {
      const cplx r = kIPow[((m - c) % 4 + 4) % 4] * inner(m, c);
      // pi phase on the second input mode, which holds total - c photons
      u(m, c) = ((total - c) % 2 == 0 ? 1.0 : -1.0) * r.real();
    }
  }
  return u;
}

// ---------------------------------------------------------------- DenseState

DenseState::DenseState(Dims n_max) : n_max_(n_max) {
  std::size_t total = 1;
  for (int d : n_max_) {
    if (d < 0) fail(ErrorKind::InvalidConfig, "negative cutoff");
    total *= static_cast<std::size_t>(d + 1);
  }
  amps_.assign(total, cplx{});
}

DenseState DenseState::product(const FockVector& a, const FockVector& b, const FockVector& c) {
  DenseState s({a.n_max(), b.n_max(), c.n_max()});
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == cplx{}) continue;
    for (int j = 0; j < b.size(); ++j) {
      const cplx ab = a[i] * b[j];
      if (ab == cplx{}) continue;
      for (int k = 0; k < c.size(); ++k) s.at(i, j, k) = ab * c[k];
    }
  }
  return s;
}

double DenseState::norm_squared() const {
  double s = 0.0;
  for (const auto& x : amps_) s += std::norm(x);
  return s;
}

DenseState& DenseState::operator*=(cplx s) {
  for (auto& x : amps_) x *= s;
  return *this;
}

DenseState& DenseState::operator+=(const DenseState& other) {
  if (other.n_max_ != n_max_) fail(ErrorKind::InvalidConfig, "dense states with different cutoffs");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
  return *this;
}

cplx inner(const DenseState& bra, const DenseState& ket) {
  if (bra.n_max() != ket.n_max()) fail(ErrorKind::InvalidConfig, "dense states with different cutoffs");
  cplx s{};
  const auto x = bra.amps();
  const auto y = ket.amps();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double fidelity(const DenseState& a, const DenseState& b) {
  const double na = a.norm_squared();
  const double nb = b.norm_squared();
  if (na <= 0.0 || nb <= 0.0) fail(ErrorKind::ZeroNormState, "fidelity of a zero state");
  return std::norm(inner(a, b)) / (na * nb);
}

// ---------------------------------------------------------------- operations

DenseState apply_bs_dense(const DenseState& state, ModePair modes, BsConvention convention) {
  const int i = index_of(modes.first);
  const int j = index_of(modes.second);
  if (i == j) fail(ErrorKind::InvalidConfig, "beam splitter needs two distinct modes");
  const int o = 3 - i - j;
  const auto& n_max = state.n_max();
  const auto st = strides_of(n_max);
  const int ni = n_max[i];
  const int nj = n_max[j];
  const int d_other = n_max[o] + 1;
  const auto in = state.amps();

  std::vector<double> block_weight(static_cast<std::size_t>(ni + nj + 1), 0.0);
  for (int p = 0; p <= ni; ++p) {
    for (int q = 0; q <= nj; ++q) {
      const std::size_t base = p * st[i] + q * st[j];
      double w = 0.0;
      for (int r = 0; r < d_other; ++r) w += std::norm(in[base + r * st[o]]);
      block_weight[p + q] += w;
    }
  }
  const double skip = kBlockSkipWeight * std::max(1.0, state.norm_squared());

  DenseState out(n_max);
  auto dst = out.amps();
  for (int total = 0; total <= ni + nj; ++total) {
    if (block_weight[total] <= skip) continue;
    const int lo = std::max(0, total - nj);
    const int hi = std::min(total, ni);
    const int len = hi - lo + 1;
    const Eigen::MatrixXcd u = bs_block(total, convention).block(lo, lo, len, len).cast<cplx>();
    Eigen::MatrixXcd x(len, d_other);
    for (int k = 0; k < len; ++k) {
      const std::size_t base = (lo + k) * st[i] + (total - lo - k) * st[j];
      for (int r = 0; r < d_other; ++r) x(k, r) = in[base + r * st[o]];
    }
    const Eigen::MatrixXcd y = u * x;
    for (int k = 0; k < len; ++k) {
      const std::size_t base = (lo + k) * st[i] + (total - lo - k) * st[j];
      for (int r = 0; r < d_other; ++r) dst[base + r * st[o]] = y(k, r);
    }
  }
  return out;
}

DenseState apply_mode_op(const DenseState& state, Mode mode, const DiagonalOp& op) {
  const int d = state.dim(mode);
  if (op.n_max() + 1 < d) {
    fail(ErrorKind::CutoffTooSmall, std::string("operator smaller than mode ") + mode_char(mode));
  }
  const auto v = view_of(state.n_max(), mode);
  DenseState out = state;
  auto amps = out.amps();
  for (std::size_t p = 0; p < v.pre; ++p) {
    for (std::size_t n = 0; n < v.d; ++n) {
      const cplx f = op[static_cast<int>(n)];
      cplx* row = amps.data() + (p * v.d + n) * v.post;
      for (std::size_t q = 0; q < v.post; ++q) row[q] *= f;
    }
  }
  return out;
}

DenseState apply_mode_op(const DenseState& state, Mode mode, const DenseOp& op) {
  const int d = state.dim(mode);
  if (op.n_max() + 1 < d) {
    fail(ErrorKind::CutoffTooSmall, std::string("operator smaller than mode ") + mode_char(mode));
  }
  const Eigen::MatrixXcd m = op.matrix().topLeftCorner(d, d);
  const auto v = view_of(state.n_max(), mode);
  const auto dv = static_cast<Eigen::Index>(v.d);
  const auto pv = static_cast<Eigen::Index>(v.post);
  DenseState out(state.n_max());
  const auto in = state.amps();
  auto dst = out.amps();
  for (std::size_t p = 0; p < v.pre; ++p) {
    ConstRowMajorMap x(in.data() + p * v.d * v.post, dv, pv);
    RowMajorMap y(dst.data() + p * v.d * v.post, dv, pv);
    y.noalias() = m * x;
  }
  return out;
}

DenseState apply_joint_parity(const DenseState& state, Sign sigma_ab) {
  const int want = sigma_ab == Sign::Plus ? 0 : 1;
  DenseState out = state;
  const auto& n = state.n_max();
  for (int a = 0; a <= n[0]; ++a) {
    for (int b = 0; b <= n[1]; ++b) {
      if ((a + b) % 2 == want) continue;
      for (int c = 0; c <= n[2]; ++c) out.at(a, b, c) = 0.0;
    }
  }
  return out;
}

ReducedStateC reduced_mode(const DenseState& state, Mode mode) {
  const auto v = view_of(state.n_max(), mode);
  const auto dv = static_cast<Eigen::Index>(v.d);
  const auto pv = static_cast<Eigen::Index>(v.post);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dv, dv);
  const auto in = state.amps();
  for (std::size_t p = 0; p < v.pre; ++p) {
    ConstRowMajorMap x(in.data() + p * v.d * v.post, dv, pv);
    rho.noalias() += x * x.adjoint();
  }
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) fail(ErrorKind::ZeroNormState, "reduced state of a zero state");
  return ReducedStateC::from_density(rho / tr);
}

ReducedStateC reduced_c(const DenseState& state) { return reduced_mode(state, Mode::C); }

double leakage(const DenseState& state) {
  const double total = state.norm_squared();
  if (!(total > 0.0)) return 0.0;
  double worst = 0.0;
  for (Mode m : {Mode::A, Mode::B, Mode::C}) {
    const auto v = view_of(state.n_max(), m);
    const std::size_t start = v.d > kLeakLevels ? v.d - kLeakLevels : 0;
    double tail = 0.0;
    const auto in = state.amps();
    for (std::size_t p = 0; p < v.pre; ++p) {
      for (std::size_t n = start; n < v.d; ++n) {
        const cplx* row = in.data() + (p * v.d + n) * v.post;
        for (std::size_t q = 0; q < v.post; ++q) tail += std::norm(row[q]);
      }
    }
    worst = std::max(worst, tail / total);
  }
  return worst;
}

}  // namespace catport
