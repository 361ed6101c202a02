#include "catport/engine.hpp"

namespace catport {

State apply_bs(const State& state, ModePair modes, BsConvention convention) {
  if (const auto* d = std::get_if<DenseState>(&state)) return apply_bs_dense(*d, modes, convention);
  return apply_bs_branch(std::get<BranchState>(state), modes);
}

State apply_mode_op(const State& state, Mode mode, const DiagonalOp& op) {
  return std::visit([&](const auto& s) -> State { return apply_mode_op(s, mode, op); }, state);
}

State apply_mode_op(const State& state, Mode mode, const DenseOp& op) {
  return std::visit([&](const auto& s) -> State { return apply_mode_op(s, mode, op); }, state);
}

State apply_joint_parity(const State& state, Sign sigma_ab) {
  return std::visit([&](const auto& s) -> State { return apply_joint_parity(s, sigma_ab); }, state);
}

State prune(const State& state) {
  if (const auto* b = std::get_if<BranchState>(&state)) return prune_branches(*b);
  return state;
}

State scaled(const State& state, cplx s) {
  return std::visit(
      [&](auto copy) -> State {
        copy *= s;
        return copy;
      },
      state);
}

double norm_squared(const State& state) {
  return std::visit([](const auto& s) { return s.norm_squared(); }, state);
}

ReducedStateC reduced_mode(const State& state, Mode mode) {
  return std::visit([&](const auto& s) { return reduced_mode(s, mode); }, state);
}

ReducedStateC reduced_c(const State& state) { return reduced_mode(state, Mode::C); }

double leakage(const State& state) {
  return std::visit([](const auto& s) { return leakage(s); }, state);
}

std::size_t branch_count(const State& state) {
  if (const auto* b = std::get_if<BranchState>(&state)) return b->size();
  return 1;
}

const Dims& cutoffs(const State& state) {
  return std::visit([](const auto& s) -> const Dims& { return s.n_max(); }, state);
}

DenseState as_dense(const State& state) {
  if (const auto* d = std::get_if<DenseState>(&state)) return *d;
  return to_dense(std::get<BranchState>(state));
}

double fidelity(const State& a, const State& b) {
  const auto* ba = std::get_if<BranchState>(&a);
  const auto* bb = std::get_if<BranchState>(&b);
  if (ba && bb) return fidelity(*ba, *bb);
  return fidelity(as_dense(a), as_dense(b));
}

}  // namespace catport
