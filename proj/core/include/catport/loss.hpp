#pragma once

// Photon loss on mode a, applied right after the parity measurement, and the
// loss-averaged teleportation fidelity.

#include "catport/focknum.hpp"
#include "catport/protocol.hpp"

namespace catport {

/// Cumulative Kraus weight at which the k sum stops.
inline constexpr double kKrausCoverage = 1e-10;

/// A_k = sum_n sqrt(C(n,k)) eta^{(n-k)/2} (1-eta)^{k/2} |n-k><n|, with eta the
/// transmissivity (1 - eta is the loss probability).
DenseOp kraus_operator(double eta, int k, int n_max);

struct LossChannel {
  double eta = 1.0;
  int k_max = 0;

  /// Smallest k_max whose operators cover the occupied block [0, n_max]
  /// to within kKrausCoverage (every level n <= n_max is covered once k_max = n_max).
  static LossChannel covering(double eta, int n_max);
  /// max_n |sum_k (A_k^dag A_k)_nn - 1| over n <= inner_n_max, plus the largest
  /// off-diagonal entry.
  double completeness_defect(int n_max, int inner_n_max) const;
};

struct LossResult {
  double fidelity = 0.0;
  /// sum of p_k actually visited.
  double weight = 0.0;
  int kraus_terms = 0;
};

/// F_av = sum_k p_k F^k for Variant 1 with the given outcomes.
LossResult lossy_fidelity(const ProtocolConfig& cfg, double eta, const Outcomes& outcomes);

}  // namespace catport
