#pragma once

// The teleportation pipeline on modes (a, b, c): mode a carries the logical
// state, b and c share the entangled cat resource, a and b are mixed on a
// second beam splitter and measured, and the correction is applied to c.

#include <optional>
#include <random>
#include <string>

#include "catport/engine.hpp"
#include "catport/focknum.hpp"

namespace catport {

/// Outcomes below this probability are reported as impossible.
inline constexpr double kImpossibleProbability = 1e-15;

enum class Variant { SingleParity = 1, JointParity = 2 };
enum class CorrectionMode { Physical, IdealLogical };
enum class Correction { I, Z, X, XZ };

const char* to_string(Correction c);

struct ProtocolConfig {
  cplx mu{0.5};
  cplx nu{0.8660254037844386};
  cplx alpha{4.0};
  cplx beta{0.0, 4.0};
  Variant variant = Variant::SingleParity;
  /// Explicit interaction time; when absent tau = pi / (xi nbar).
  std::optional<double> tau;
  double xi = 2.0;
  /// Readout outcome counts; N = k_plus + k_minus repeated readouts.
  int k_plus = 1;
  int k_minus = 0;
  Engine engine = Engine::Branch;
  CorrectionMode correction_mode = CorrectionMode::Physical;
  /// Replace the dispersive readout by an exact projection of mode a onto the
  /// span of the collapsed coherent pair.
  bool ideal_collapse = false;
  std::optional<Dims> cutoffs;
  /// Fault-injection hook for the validation suite.
  BsConvention bs_convention = BsConvention::Standard;

  /// Throws invalid-config naming the failing precondition.
  void validate() const;
  double resolved_tau() const;
  Dims resolved_cutoffs() const;
  int readouts() const { return k_plus + k_minus; }
  double mean_boson_number() const { return std::norm(alpha) + std::norm(beta); }
  cplx chi() const;
  cplx chi_bar() const;
};

struct Outcomes {
  Sign sigma_a = Sign::Plus;
  Sign sigma_b = Sign::Plus;
  /// Variant 2 joint parity.
  Sign sigma_ab = Sign::Plus;
  int k_plus = 1;
  int k_minus = 0;
};

/// (+, +) parity outcomes with the configured readout counts.
Outcomes default_outcomes(const ProtocolConfig& cfg);
std::string describe(const Outcomes& o, Variant v);

struct StageResult {
  State state;
  double probability = 0.0;
};

struct CorrectionResult {
  State state;
  double x_failure_weight = 0.0;
};

struct TeleportResult {
  Outcomes outcomes;
  Sign sigma_a_prime = Sign::Plus;
  Correction correction = Correction::I;
  double tau = 0.0;
  /// p(sigma_a, sigma_b) or p(sigma_ab).
  double measurement_probability = 0.0;
  /// p(readout | parity outcome).
  double conditional_probability = 0.0;
  double joint_probability = 0.0;
  double fidelity = 0.0;
  double x_failure_weight = 0.0;
  std::size_t branch_count = 0;
  double leakage = 0.0;
  ReducedStateC reduced;
};

State prepare_initial(const ProtocolConfig& cfg);
State entangle_resource(const State& state, const ProtocolConfig& cfg);
State second_bs(const State& state, const ProtocolConfig& cfg);
/// prepare -> entangle -> second beam splitter.
State pre_measurement_state(const ProtocolConfig& cfg);

StageResult measure_variant1(const State& state, Sign sigma_a, Sign sigma_b);
StageResult measure_variant2(const State& state, Sign sigma_ab);
StageResult measure_parity(const State& state, const ProtocolConfig& cfg, const Outcomes& o);

/// D(chi) on mode a followed by the readout (or the ideal collapse). The
/// probability is conditional on the incoming state.
StageResult displaced_dispersive(const State& state, const ProtocolConfig& cfg, int k_plus,
                                 int k_minus);

/// Which collapse a readout record indicates: + for the chi pair, - for chi-bar.
Sign classify_readout(const ProtocolConfig& cfg, int k_plus, int k_minus);
Correction correction_for(Variant variant, const Outcomes& o, Sign sigma_a_prime);
CorrectionResult apply_correction(const State& state, Correction correction,
                                  const ProtocolConfig& cfg);

/// mu |0_L>_beta + nu |1_L>_beta at n_max.
FockVector target_state(const ProtocolConfig& cfg, int n_max);

TeleportResult teleport(const ProtocolConfig& cfg, const Outcomes& outcomes);
TeleportResult teleport(const ProtocolConfig& cfg);

/// Readout, correction and fidelity for an already parity-measured state; the
/// shared tail of teleport and the loss average.
TeleportResult finish_after_parity(const State& measured, double measurement_probability,
                                   const ProtocolConfig& cfg, const Outcomes& outcomes);
/// Correction and fidelity given the readout stage.
TeleportResult finish_from_readout(const StageResult& readout, double measurement_probability,
                                   const ProtocolConfig& cfg, const Outcomes& outcomes);

struct AverageResult {
  double fidelity = 0.0;
  double weight = 0.0;
  int outcomes_used = 0;
};

/// sum over readout records of F p, each record corrected per its own row.
AverageResult average_fidelity(const ProtocolConfig& cfg, Sign sigma_a, Sign sigma_b);
/// Variant 2 form, keyed by the joint parity outcome.
AverageResult average_fidelity_joint(const ProtocolConfig& cfg, Sign sigma_ab);

/// The post-second-beam-splitter state written as the logical expansion with
/// labels chi and chi-bar (branch engine, exact cat normalizations).
BranchState idealized_expansion(const ProtocolConfig& cfg);
/// Fidelity of the exact post-second-beam-splitter state against it.
double approximation_fidelity(const ProtocolConfig& cfg);

/// Draws parity and readout outcomes with their Born probabilities.
Outcomes sample_outcomes(const ProtocolConfig& cfg, std::mt19937_64& rng);

/// Projector onto span{|g_i>} (labels within 1e-12 are merged), as a dense
/// operator with an exact coherent rule.
DenseOp coherent_span_projector(const std::vector<cplx>& labels, int n_max);

}  // namespace catport
