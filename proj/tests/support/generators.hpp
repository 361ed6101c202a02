#pragma once

// Seeded random inputs for property tests. Every generator takes the engine by
// reference so a failing case is reproducible from the printed seed.

#include <random>
#include <vector>

#include "catport/branch_state.hpp"
#include "catport/dense_state.hpp"
#include "catport/focknum.hpp"

namespace catport::testing {

inline constexpr int kPropertyCases = 25;

inline cplx random_complex(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> r(0.0, radius);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
  return std::polar(r(rng), phi(rng));
}

inline FockVector random_vector(std::mt19937_64& rng, int n_max, int support) {
  std::normal_distribution<double> g;
  std::vector<cplx> amps(static_cast<size_t>(n_max + 1));
  for (int n = 0; n <= std::min(n_max, support); ++n) amps[n] = {g(rng), g(rng)};
  return FockVector(std::move(amps)).normalized();
}

inline DenseState random_dense(std::mt19937_64& rng, Dims n_max, int support) {
  std::normal_distribution<double> g;
  DenseState s(n_max);
  for (int a = 0; a <= std::min(n_max[0], support); ++a)
    for (int b = 0; b <= std::min(n_max[1], support); ++b)
      for (int c = 0; c <= std::min(n_max[2], support); ++c) s.at(a, b, c) = {g(rng), g(rng)};
  s *= 1.0 / std::sqrt(s.norm_squared());
  return s;
}

inline BranchState random_coherent_branches(std::mt19937_64& rng, Dims n_max, int count,
                                            double radius) {
  BranchState s(n_max);
  for (int i = 0; i < count; ++i) {
    Branch b;
    b.coeff = random_complex(rng, 1.0);
    for (auto& f : b.factors) f = CoherentFactor{random_complex(rng, radius), std::polar(1.0, 0.3 * i)};
    s.add(b);
  }
  s *= 1.0 / std::sqrt(s.norm_squared());
  return s;
}

}  // namespace catport::testing
