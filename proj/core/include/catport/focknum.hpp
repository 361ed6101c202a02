#pragma once

// Single-mode Fock-space algebra: truncated state vectors, diagonal and dense
// single-mode operators, and the constructors the teleportation protocol needs
// (coherent and cat states, displacement, parity and dispersive POVMs).

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace catport {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Probability weight allowed on the top levels of a leak-checked vector.
inline constexpr double kLeakThreshold = 1e-10;
inline constexpr int kLeakLevels = 5;

enum class Sign { Plus, Minus };

inline int sign_value(Sign s) { return s == Sign::Plus ? 1 : -1; }
inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
char sign_char(Sign s);

/// Cutoff policy: ceil(m + 8 sqrt(m) + 20) for a mode whose largest mean
/// occupation during a run is m.
int cutoff_for_mean(double mean_occupation);

/// Amplitudes over Fock levels 0..n_max. May be subnormalized (a
/// post-measurement branch); never renormalized implicitly.
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(std::vector<cplx> amps);

  static FockVector zeros(int n_max);
  static FockVector basis(int level, int n_max);

  int n_max() const { return static_cast<int>(amps_.size()) - 1; }
  int size() const { return static_cast<int>(amps_.size()); }
  std::span<const cplx> amps() const { return amps_; }

  /// Zero beyond n_max so vectors of different cutoffs compose.
  cplx operator[](int level) const {
    return level >= 0 && level < size() ? amps_[level] : cplx{};
  }

  double norm_squared() const;
  /// Weight on the highest `levels` stored levels.
  double tail_weight(int levels = kLeakLevels) const;
  /// sum_n n |amp_n|^2 (not divided by the norm).
  double mean_occupation() const;

  FockVector resized(int n_max) const;
  FockVector normalized() const;

  FockVector& operator*=(cplx s);
  FockVector& operator+=(const FockVector& other);

 private:
  std::vector<cplx> amps_;
};

FockVector operator*(cplx s, FockVector v);
FockVector operator+(FockVector a, const FockVector& b);
FockVector operator-(FockVector a, const FockVector& b);

/// <bra|ket>, zero-padding the shorter vector.
cplx inner(const FockVector& bra, const FockVector& ket);

/// |<a|b>|^2 / (|a|^2 |b|^2).
double fidelity(const FockVector& a, const FockVector& b);

/// How an operator maps a coherent state |label> onto a finite combination of
/// coherent states. Operators that admit one let the branch engine stay exact
/// without expanding into Fock space.
struct CoherentTerm {
  cplx coeff;
  cplx label;
};
using CoherentRule = std::function<std::vector<CoherentTerm>(cplx label)>;

class DiagonalOp {
 public:
  explicit DiagonalOp(std::vector<cplx> diag, CoherentRule rule = {});

  int n_max() const { return static_cast<int>(diag_.size()) - 1; }
  std::span<const cplx> diag() const { return diag_; }
  cplx operator[](int level) const { return diag_[level]; }
  const CoherentRule& coherent_rule() const { return rule_; }

  FockVector apply(const FockVector& v) const;
  /// (*this) * rhs, i.e. rhs acts first.
  DiagonalOp compose(const DiagonalOp& rhs) const;
  DiagonalOp adjoint() const;

 private:
  std::vector<cplx> diag_;
  CoherentRule rule_;
};

class DenseOp {
 public:
  explicit DenseOp(Eigen::MatrixXcd matrix, CoherentRule rule = {});

  int n_max() const { return static_cast<int>(matrix_.rows()) - 1; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const CoherentRule& coherent_rule() const { return rule_; }

  FockVector apply(const FockVector& v) const;
  /// (*this) * rhs.
  DenseOp compose(const DenseOp& rhs) const;
  DenseOp adjoint() const;

  /// max |(U^dag U - I)_{mn}| over 0 <= m,n <= inner_n_max.
  double unitarity_defect(int inner_n_max) const;

 private:
  Eigen::MatrixXcd matrix_;
  CoherentRule rule_;
};

/// Logical cat-qubit basis state |bit_L>_amplitude.
struct LogicalLabel {
  int bit = 0;
  cplx amplitude{};
};

/// e^{-|g|^2/2} g^n / sqrt(n!) via a rescaled running product. Throws
/// cutoff-too-small when the top levels carry more than kLeakThreshold.
FockVector coherent_vector(cplx gamma, int n_max);

/// Same amplitudes without the leak check (used to build operator columns).
FockVector coherent_vector_unchecked(cplx gamma, int n_max);

/// sqrt(2 (1 + e^{-2|g|^2})) for bit 0, sqrt(2 (1 - e^{-2|g|^2})) for bit 1.
double cat_norm_factor(cplx gamma, int bit);

/// (|g> + (-1)^bit |-g>) / cat_norm_factor, with exact zeros on the levels of
/// the wrong parity.
FockVector cat_vector(cplx gamma, int bit, int n_max);
FockVector logical_vector(const LogicalLabel& label, int n_max);

/// D(gamma) truncated to (n_max+1)^2. Matrix elements come from the
/// associated-Laguerre form, with the polynomials built by recurrence.
DenseOp displacement(cplx gamma, int n_max);

/// P+ projects on even levels, P- on odd levels.
DiagonalOp parity_projector(Sign sigma, int n_max);

/// Photon-number parity (-1)^n; maps |g> to |-g>.
DiagonalOp parity_operator(int n_max);

/// e^{-i theta n}.
DiagonalOp phase_rotation(double theta, int n_max);

/// Z_L = e^{-i pi n}, stored with exact +-1 entries.
DiagonalOp logical_z(int n_max);

/// sqrt(C(N,k+)) cos^{k+}(n tau) sin^{k-}(n tau), N = k+ + k-, evaluated in
/// the log domain. The free phase of the readout is fixed to zero.
DiagonalOp dispersive_operator(double tau, int k_plus, int k_minus, int n_max);

/// Center of the Gaussian envelope of the repeated-readout operator:
/// 0.5 arccos((k+ - k-) / N).
double gaussian_peak_center(int k_plus, int k_minus);

/// pi / (xi (|alpha|^2 + |beta|^2)).
double optimal_tau(cplx alpha, cplx beta, double xi);

/// <g1|g2> = exp(-|g1|^2/2 - |g2|^2/2 + conj(g1) g2).
cplx coherent_overlap(cplx g1, cplx g2);

double log_binomial(int n, int k);

}  // namespace catport
