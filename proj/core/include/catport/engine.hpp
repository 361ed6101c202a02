#pragma once

// Three-mode states under either engine, with engine-agnostic dispatch.

#include <variant>

#include "catport/branch_state.hpp"
#include "catport/dense_state.hpp"
#include "catport/reduced_state.hpp"

namespace catport {

enum class Engine { Dense, Branch };

using State = std::variant<DenseState, BranchState>;

State apply_bs(const State& state, ModePair modes, BsConvention convention = BsConvention::Standard);
State apply_mode_op(const State& state, Mode mode, const DiagonalOp& op);
State apply_mode_op(const State& state, Mode mode, const DenseOp& op);
State apply_joint_parity(const State& state, Sign sigma_ab);
/// No-op for dense states.
State prune(const State& state);
State scaled(const State& state, cplx s);

double norm_squared(const State& state);
ReducedStateC reduced_mode(const State& state, Mode mode);
ReducedStateC reduced_c(const State& state);
double leakage(const State& state);
/// Number of branches, or 1 for a dense state.
std::size_t branch_count(const State& state);
const Dims& cutoffs(const State& state);

/// Global-state fidelity across engines (branch states are expanded).
double fidelity(const State& a, const State& b);
DenseState as_dense(const State& state);

}  // namespace catport
