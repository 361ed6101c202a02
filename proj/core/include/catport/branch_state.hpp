#pragma once

#include <array>
#include <span>
#include <vector>

#include "catport/dense_state.hpp"
#include "catport/focknum.hpp"
#include "catport/reduced_state.hpp"

namespace catport {

inline constexpr double kPruneWeight = 1e-14;
inline constexpr double kMergeTolerance = 1e-12;

struct Branch {
  cplx coeff{1.0};
  std::array<ModeFactor, 3> factors;

  const ModeFactor& factor(Mode m) const { return factors[index_of(m)]; }
  ModeFactor& factor(Mode m) { return factors[index_of(m)]; }
};

/// Finite weighted sum of product branches. n_max holds the cutoff each mode
/// is expanded at when a coherent label has to become a Fock vector.
class BranchState {
 public:
  explicit BranchState(Dims n_max, std::vector<Branch> branches = {});

  const Dims& n_max() const { return n_max_; }
  std::span<const Branch> branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  bool empty() const { return branches_.empty(); }

  void add(Branch b) { branches_.push_back(std::move(b)); }
  double norm_squared() const;
  BranchState& operator*=(cplx s);

 private:
  Dims n_max_;
  std::vector<Branch> branches_;
};

/// Sum of two branch states (branch lists concatenated).
BranchState operator+(const BranchState& x, const BranchState& y);

cplx inner(const BranchState& bra, const BranchState& ket);
double fidelity(const BranchState& a, const BranchState& b);

/// Unsupported-representation if either targeted factor is explicit.
BranchState apply_bs_branch(const BranchState& state, ModePair modes);
/// Operators carrying a coherent rule keep coherent factors coherent;
/// otherwise the factor is expanded at the operator's cutoff first.
BranchState apply_mode_op(const BranchState& state, Mode mode, const DiagonalOp& op);
BranchState apply_mode_op(const BranchState& state, Mode mode, const DenseOp& op);
BranchState apply_joint_parity(const BranchState& state, Sign sigma_ab);

BranchState prune_branches(const BranchState& state);

DenseState to_dense(const BranchState& state);

ReducedStateC reduced_mode(const BranchState& state, Mode mode);
ReducedStateC reduced_c(const BranchState& state);

/// Largest top-level weight over the explicit factors (coherent labels are
/// leak-checked whenever they are expanded).
double leakage(const BranchState& state);

}  // namespace catport
