#include "catport/branch_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catport/errors.hpp"

namespace catport {

namespace {

struct FactorTerm {
  cplx coeff;
  ModeFactor factor;
};

// Single unit-modulus terms go into the factor phase, anything else into the
// branch coefficient.
FactorTerm coherent_term(const CoherentFactor& f, const CoherentTerm& t) {
  if (std::abs(std::abs(t.coeff) - 1.0) < 1e-15) {
    return {1.0, CoherentFactor{t.label, f.phase * t.coeff}};
  }
  return {t.coeff, CoherentFactor{t.label, f.phase}};
}

template <class Op>
std::vector<FactorTerm> apply_to_factor(const ModeFactor& factor, const Op& op) {
  if (const auto* c = std::get_if<CoherentFactor>(&factor)) {
    if (op.coherent_rule()) {
      std::vector<FactorTerm> out;
      for (const auto& t : op.coherent_rule()(c->label)) {
        if (t.coeff == cplx{}) continue;
        out.push_back(coherent_term(*c, t));
      }
      return out;
    }
    return {{1.0, op.apply(factor_vector(factor, op.n_max()))}};
  }
  return {{1.0, op.apply(std::get<FockVector>(factor))}};
}

template <class Op>
BranchState apply_op_impl(const BranchState& state, Mode mode, const Op& op) {
  BranchState out(state.n_max());
  for (const auto& b : state.branches()) {
    for (auto& t : apply_to_factor(b.factor(mode), op)) {
      Branch nb = b;
      nb.coeff *= t.coeff;
      nb.factor(mode) = std::move(t.factor);
      out.add(std::move(nb));
    }
  }
  return out;
}

double branch_weight(const Branch& b) {
  double w = std::abs(b.coeff);
  for (const auto& f : b.factors) w *= std::sqrt(factor_norm_squared(f));
  return w;
}

bool same_labels(const Branch& x, const Branch& y) {
  for (int m = 0; m < 3; ++m) {
    const auto* cx = std::get_if<CoherentFactor>(&x.factors[m]);
    const auto* cy = std::get_if<CoherentFactor>(&y.factors[m]);
    if (!cx || !cy) return false;
    if (std::abs(cx->label - cy->label) > kMergeTolerance) return false;
  }
  return true;
}

bool all_coherent(const Branch& b) {
  return std::all_of(b.factors.begin(), b.factors.end(),
                     [](const ModeFactor& f) { return is_coherent(f); });
}

// Folds all factor phases into the coefficient.
Branch canonical(const Branch& b) {
  Branch out = b;
  for (auto& f : out.factors) {
    auto& c = std::get<CoherentFactor>(f);
    out.coeff *= c.phase;
    c.phase = 1.0;
  }
  return out;
}

}  // namespace

BranchState::BranchState(Dims n_max, std::vector<Branch> branches)
    : n_max_(n_max), branches_(std::move(branches)) {}

double BranchState::norm_squared() const { return inner(*this, *this).real(); }

BranchState& BranchState::operator*=(cplx s) {
  for (auto& b : branches_) b.coeff *= s;
  return *this;
}

BranchState operator+(const BranchState& x, const BranchState& y) {
  Dims n{};
  for (int m = 0; m < 3; ++m) n[m] = std::max(x.n_max()[m], y.n_max()[m]);
  BranchState out(n);
  for (const auto& b : x.branches()) out.add(b);
  for (const auto& b : y.branches()) out.add(b);
  return out;
}

cplx inner(const BranchState& bra, const BranchState& ket) {
  cplx s{};
  for (const auto& x : bra.branches()) {
    for (const auto& y : ket.branches()) {
      cplx t = std::conj(x.coeff) * y.coeff;
      for (int m = 0; m < 3 && t != cplx{}; ++m) t *= factor_overlap(x.factors[m], y.factors[m]);
      s += t;
    }
  }
  return s;
}

double fidelity(const BranchState& a, const BranchState& b) {
  const double na = a.norm_squared();
  const double nb = b.norm_squared();
  if (na <= 0.0 || nb <= 0.0) fail(ErrorKind::ZeroNormState, "fidelity of a zero state");
  return std::norm(inner(a, b)) / (na * nb);
}

BranchState apply_bs_branch(const BranchState& state, ModePair modes) {
  if (modes.first == modes.second) {
    fail(ErrorKind::InvalidConfig, "beam splitter needs two distinct modes");
  }
  BranchState out(state.n_max());
  for (const auto& b : state.branches()) {
    const auto* f1 = std::get_if<CoherentFactor>(&b.factor(modes.first));
    const auto* f2 = std::get_if<CoherentFactor>(&b.factor(modes.second));
    if (!f1 || !f2) {
      fail(ErrorKind::UnsupportedRepresentation,
           std::string("beam splitter on an explicit factor of mode ") +
               mode_char(f1 ? modes.second : modes.first));
    }
    const auto [g1, g2] = bs_labels(f1->label, f2->label);
    Branch nb = b;
    nb.factor(modes.first) = CoherentFactor{g1, f1->phase * f2->phase};
    nb.factor(modes.second) = CoherentFactor{g2, 1.0};
    out.add(std::move(nb));
  }
  return out;
}

BranchState apply_mode_op(const BranchState& state, Mode mode, const DiagonalOp& op) {
  return apply_op_impl(state, mode, op);
}

BranchState apply_mode_op(const BranchState& state, Mode mode, const DenseOp& op) {
  return apply_op_impl(state, mode, op);
}

BranchState apply_joint_parity(const BranchState& state, Sign sigma_ab) {
  const auto pa = parity_operator(state.n_max()[0]);
  const auto pb = parity_operator(state.n_max()[1]);
  BranchState flipped = apply_mode_op(apply_mode_op(state, Mode::A, pa), Mode::B, pb);
  BranchState kept = state;
  kept *= 0.5;
  flipped *= 0.5 * sign_value(sigma_ab);
  return kept + flipped;
}

BranchState prune_branches(const BranchState& state) {
  std::vector<Branch> merged;
  for (const auto& b : state.branches()) {
    if (!all_coherent(b)) {
      merged.push_back(b);
      continue;
    }
    const Branch cb = canonical(b);
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Branch& m) {
      return all_coherent(m) && same_labels(m, cb);
    });
    if (it == merged.end()) {
      merged.push_back(cb);
    } else {
      it->coeff += cb.coeff;
    }
  }
  std::vector<Branch> kept;
  for (auto& b : merged) {
    if (branch_weight(b) >= kPruneWeight) kept.push_back(std::move(b));
  }
  return BranchState(state.n_max(), std::move(kept));
}

DenseState to_dense(const BranchState& state) {
  const auto& n = state.n_max();
  DenseState out(n);
  for (const auto& b : state.branches()) {
    const auto a = factor_vector(b.factor(Mode::A), n[0]);
    const auto bv = factor_vector(b.factor(Mode::B), n[1]);
    const auto c = factor_vector(b.factor(Mode::C), n[2]);
    DenseState term = DenseState::product(a, bv, c);
    term *= b.coeff;
    out += term;
  }
  return out;
}

ReducedStateC reduced_mode(const BranchState& state, Mode mode) {
  if (state.empty()) fail(ErrorKind::ZeroNormState, "reduced state of an empty branch state");
  const auto branches = state.branches();
  const auto n = static_cast<Eigen::Index>(branches.size());
  // rho = sum_ij w_i conj(w_j) prod_{other} <o_j|o_i> |m_i><m_j|
  Eigen::MatrixXcd coeffs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      cplx t = branches[i].coeff * std::conj(branches[j].coeff);
      for (int m = 0; m < 3; ++m) {
        if (m == index_of(mode)) continue;
        t *= factor_overlap(branches[j].factors[m], branches[i].factors[m]);
      }
      coeffs(i, j) = t;
      coeffs(j, i) = std::conj(t);
    }
  }
  std::vector<ModeFactor> factors;
  factors.reserve(branches.size());
  for (const auto& b : branches) factors.push_back(b.factor(mode));
  return ReducedStateC::from_gram(std::move(factors), std::move(coeffs),
                                  state.n_max()[index_of(mode)])
      .normalized();
}

ReducedStateC reduced_c(const BranchState& state) { return reduced_mode(state, Mode::C); }

double leakage(const BranchState& state) {
  double worst = 0.0;
  for (const auto& b : state.branches()) {
    for (const auto& f : b.factors) {
      if (const auto* v = std::get_if<FockVector>(&f)) {
        const double n2 = v->norm_squared();
        if (n2 > 0.0) worst = std::max(worst, v->tail_weight() / n2);
      }
    }
  }
  return worst;
}

}  // namespace catport
