#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "catport/focknum.hpp"
#include "catport/reduced_state.hpp"

namespace catport {

/// Modes are ordered (a, b, c) everywhere.
enum class Mode { A = 0, B = 1, C = 2 };
using ModePair = std::pair<Mode, Mode>;
/// Highest stored Fock level per mode.
using Dims = std::array<int, 3>;

inline int index_of(Mode m) { return static_cast<int>(m); }
char mode_char(Mode m);

/// 50/50 beam splitter on coherent labels: ((g1+g2)/sqrt2, (g1-g2)/sqrt2).
std::pair<cplx, cplx> bs_labels(cplx g1, cplx g2);

/// Flipped reverses the sign of the mixing angle. It exists only so the
/// validation suite can prove it catches a wrong beam splitter.
enum class BsConvention { Standard, Flipped };

/// Real orthogonal block of the beam splitter on the total-photon-number-N
/// subspace, basis index k = photons in the first mode.
Eigen::MatrixXd bs_block(int total, BsConvention convention = BsConvention::Standard);

class DenseState {
 public:
  explicit DenseState(Dims n_max);
  static DenseState product(const FockVector& a, const FockVector& b, const FockVector& c);

  const Dims& n_max() const { return n_max_; }
  int dim(Mode m) const { return n_max_[index_of(m)] + 1; }
  std::size_t size() const { return amps_.size(); }

  std::size_t offset(int na, int nb, int nc) const {
    return (static_cast<std::size_t>(na) * dim(Mode::B) + nb) * dim(Mode::C) + nc;
  }
  cplx& at(int na, int nb, int nc) { return amps_[offset(na, nb, nc)]; }
  cplx at(int na, int nb, int nc) const { return amps_[offset(na, nb, nc)]; }
  std::span<const cplx> amps() const { return amps_; }
  std::span<cplx> amps() { return amps_; }

  double norm_squared() const;
  DenseState& operator*=(cplx s);
  DenseState& operator+=(const DenseState& other);

 private:
  Dims n_max_;
  std::vector<cplx> amps_;
};

cplx inner(const DenseState& bra, const DenseState& ket);
double fidelity(const DenseState& a, const DenseState& b);

DenseState apply_bs_dense(const DenseState& state, ModePair modes,
                          BsConvention convention = BsConvention::Standard);
DenseState apply_mode_op(const DenseState& state, Mode mode, const DiagonalOp& op);
DenseState apply_mode_op(const DenseState& state, Mode mode, const DenseOp& op);
/// (I + sigma Pi_a Pi_b) / 2.
DenseState apply_joint_parity(const DenseState& state, Sign sigma_ab);

/// Normalized reduced state of one mode.
ReducedStateC reduced_mode(const DenseState& state, Mode mode);
ReducedStateC reduced_c(const DenseState& state);

/// Largest weight found on the top kLeakLevels levels of any mode marginal.
double leakage(const DenseState& state);

}  // namespace catport
