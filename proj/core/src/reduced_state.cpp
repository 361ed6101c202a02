#include "catport/reduced_state.hpp"

#include <algorithm>
#include <cmath>

#include "catport/errors.hpp"

namespace catport {

bool is_coherent(const ModeFactor& f) { return std::holds_alternative<CoherentFactor>(f); }

double factor_norm_squared(const ModeFactor& f) {
  if (const auto* v = std::get_if<FockVector>(&f)) return v->norm_squared();
  return 1.0;
}

FockVector factor_vector(const ModeFactor& f, int n_max) {
  if (const auto* c = std::get_if<CoherentFactor>(&f)) {
    return c->phase * coherent_vector(c->label, n_max);
  }
  const auto& v = std::get<FockVector>(f);
  if (v.n_max() > n_max) {
    double cut = 0.0;
    for (int n = n_max + 1; n <= v.n_max(); ++n) cut += std::norm(v[n]);
    if (cut > kLeakThreshold) {
      fail(ErrorKind::CutoffTooSmall, "explicit factor does not fit n_max=" + std::to_string(n_max));
    }
  }
  return v.resized(n_max);
}

cplx factor_overlap(const ModeFactor& bra, const ModeFactor& ket) {
  const auto* cb = std::get_if<CoherentFactor>(&bra);
  const auto* ck = std::get_if<CoherentFactor>(&ket);
  if (cb && ck) return std::conj(cb->phase) * ck->phase * coherent_overlap(cb->label, ck->label);
  if (!cb && !ck) return inner(std::get<FockVector>(bra), std::get<FockVector>(ket));
  if (cb) {
    const auto& v = std::get<FockVector>(ket);
    return inner(factor_vector(bra, v.n_max()), v);
  }
  const auto& v = std::get<FockVector>(bra);
  return inner(v, factor_vector(ket, v.n_max()));
}

ReducedStateC ReducedStateC::from_gram(std::vector<ModeFactor> factors, Eigen::MatrixXcd coeffs,
                                       int n_max) {
  ReducedStateC r;
  r.factors_ = std::move(factors);
  r.coeffs_ = std::move(coeffs);
  r.n_max_ = n_max;
  return r;
}

ReducedStateC ReducedStateC::from_density(Eigen::MatrixXcd rho) {
  ReducedStateC r;
  r.n_max_ = static_cast<int>(rho.rows()) - 1;
  r.rho_ = std::move(rho);
  return r;
}

namespace {

Eigen::MatrixXcd factor_gram(const std::vector<ModeFactor>& factors) {
  const auto n = static_cast<Eigen::Index>(factors.size());
  Eigen::MatrixXcd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      s(i, j) = factor_overlap(factors[i], factors[j]);
      s(j, i) = std::conj(s(i, j));
    }
  }
  return s;
}

}  // namespace

double ReducedStateC::trace() const {
  if (!is_gram()) return rho_.trace().real();
  // tr rho = sum_ij M_ij <f_j|f_i>
  const auto s = factor_gram(factors_);
  return (coeffs_.cwiseProduct(s.transpose())).sum().real();
}

ReducedStateC ReducedStateC::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) fail(ErrorKind::ZeroNormState, "reduced state has zero trace");
  ReducedStateC r = *this;
  if (is_gram()) {
    r.coeffs_ /= t;
  } else {
    r.rho_ /= t;
  }
  return r;
}

cplx ReducedStateC::expectation(const FockVector& bra, const FockVector& ket) const {
  if (!is_gram()) {
    cplx s{};
    const int d = static_cast<int>(rho_.rows());
    for (int m = 0; m < d; ++m) {
      if (bra[m] == cplx{}) continue;
      for (int n = 0; n < d; ++n) s += std::conj(bra[m]) * rho_(m, n) * ket[n];
    }
    return s;
  }
  const ModeFactor fb = bra;
  const ModeFactor fk = ket;
  const auto n = static_cast<Eigen::Index>(factors_.size());
  Eigen::VectorXcd left(n), right(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    left(i) = factor_overlap(fb, factors_[i]);
    right(i) = factor_overlap(factors_[i], fk);
  }
  return left.transpose() * coeffs_ * right;
}

Eigen::MatrixXcd ReducedStateC::density() const {
  if (!is_gram()) return rho_;
  const int d = n_max_ + 1;
  Eigen::MatrixXcd vecs(d, static_cast<Eigen::Index>(factors_.size()));
  for (size_t i = 0; i < factors_.size(); ++i) {
    const auto v = factor_vector(factors_[i], n_max_);
    for (int m = 0; m < d; ++m) vecs(m, static_cast<Eigen::Index>(i)) = v[m];
  }
  return vecs * coeffs_ * vecs.adjoint();
}

double ReducedStateC::purity() const {
  if (!is_gram()) return (rho_ * rho_).trace().real();
  const auto s = factor_gram(factors_);
  const Eigen::MatrixXcd ms = coeffs_ * s;
  return (ms * ms).trace().real();
}

double ReducedStateC::min_eigenvalue() const {
  Eigen::MatrixXcd rho = density();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double ReducedStateC::hermiticity_defect() const {
  if (!is_gram()) return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  return (coeffs_ - coeffs_.adjoint()).cwiseAbs().maxCoeff();
}

double fidelity_c(const ReducedStateC& rho, const FockVector& target) {
  return rho.expectation(target, target).real();
}

}  // namespace catport
