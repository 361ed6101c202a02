#pragma once

// Parameter sweeps behind the figure presets, the Fock-distribution probes and
// the optimal-xi search.

#include <optional>
#include <string>
#include <vector>

#include "catport/protocol.hpp"

namespace catport {

enum class SweepKind { AlphaBeta, Xi, AverageXi, Measurements, Loss, Distribution };

/// How tau is set at each grid point.
enum class TauRule {
  /// pi / (4 alpha^2)
  QuarterAlphaSquared,
  /// pi / (xi nbar) with the point's xi (2 unless xi is swept).
  Xi,
};

struct SweepSpec {
  std::string figure;
  SweepKind kind = SweepKind::AlphaBeta;
  /// mu, nu, variant, engine, correction mode and readout counts.
  ProtocolConfig base;
  Outcomes outcomes;
  TauRule tau_rule = TauRule::Xi;
  std::vector<double> alphas;
  /// beta values (maps sweep |beta| along a fixed real or imaginary axis).
  std::vector<cplx> betas;
  std::vector<double> xis;
  /// N values for readout sweeps (k+ = N, k- = 0) and loss sweeps.
  std::vector<int> readouts;
  std::vector<double> losses;

  /// Throws invalid-config on empty or non-monotone grids.
  void validate() const;
};

struct ResultRow {
  std::string figure;
  Variant variant = Variant::SingleParity;
  double alpha = 0.0;
  cplx beta;
  std::optional<double> xi;
  double tau = 0.0;
  int k_plus = 0;
  int k_minus = 0;
  std::optional<double> loss;
  std::string outcome;
  std::optional<double> fidelity;
  std::optional<double> avg_fidelity;
  std::optional<double> probability;
  std::optional<std::size_t> branch_count;
  std::optional<double> leakage;
  /// Wall time of the point; never written to data files.
  double seconds = 0.0;

  int readouts() const { return k_plus + k_minus; }
};

struct DistRow {
  std::string figure;
  std::string stage;
  Variant variant = Variant::SingleParity;
  double alpha = 0.0;
  cplx beta;
  double tau = 0.0;
  int n = 0;
  double p_n = 0.0;
  double cos_ntau = 0.0;
};

enum class DistStage { IdealCoherentSet, MeasuredModeA };

/// lo, lo + step, ..., hi inclusive; points are lo + i step, not accumulated.
std::vector<double> linear_grid(double lo, double hi, double step);
std::vector<cplx> on_real_axis(const std::vector<double>& values);
std::vector<cplx> on_imaginary_axis(const std::vector<double>& values);

/// Every point of the spec evaluated with `jobs` workers (0 = hardware
/// concurrency); rows come back in grid order regardless of jobs.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, int jobs = 1);
std::vector<ResultRow> sweep_alpha_beta(const SweepSpec& spec, int jobs = 1);
std::vector<ResultRow> sweep_xi(const SweepSpec& spec, int jobs = 1);
std::vector<ResultRow> sweep_measurements(const SweepSpec& spec, int jobs = 1);
std::vector<ResultRow> sweep_loss(const SweepSpec& spec, int jobs = 1);

/// p_n of mode a after D(chi): either the equal mixture of the four coherent
/// labels {0, 2chi, chi+chibar, chi-chibar}, or the parity-measured state.
std::vector<DistRow> fock_distribution(const ProtocolConfig& cfg, DistStage stage,
                                       const Outcomes& outcomes);
/// Every (beta, stage) of a Distribution spec.
std::vector<DistRow> run_distribution(const SweepSpec& spec);

/// Local maxima of p_n that carry at least `min_fraction` of the largest p_n.
std::vector<int> histogram_peaks(const std::vector<DistRow>& rows, double min_fraction = 1e-3);

struct XiOptimum {
  double xi = 0.0;
  double fidelity = 0.0;
};

/// Grid search over [lo, hi] at `step`, then golden-section refinement to
/// `tolerance` in xi. Uses the average fidelity when `average` is set.
XiOptimum find_optimal_xi(const ProtocolConfig& cfg, const Outcomes& outcomes, double lo = 1.8,
                          double hi = 2.4, double step = 0.01, double tolerance = 1e-3,
                          bool average = false);

/// Figure ids accepted by figure_preset.
const std::vector<std::string>& figure_ids();
/// Throws invalid-config on an unknown id.
SweepSpec figure_preset(const std::string& id);

struct OracleReport {
  int points = 0;
  double max_probability_gap = 0.0;
  double max_fidelity_gap = 0.0;
};

/// Re-runs up to `max_points` grid points of the spec with both engines after
/// rescaling every amplitude so that max(alpha, |beta|) <= 1.5.
OracleReport oracle_replay(const SweepSpec& spec, int max_points = 8);

}  // namespace catport
