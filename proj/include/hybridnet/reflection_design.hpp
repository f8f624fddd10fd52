#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hybridnet/channel.hpp"
#include "hybridnet/config.hpp"
#include "hybridnet/convex_sdp.hpp"
#include "hybridnet/metrics.hpp"

namespace hybridnet {

// Transceiver snapshot the reflection subproblem treats as constant. The
// aggregation users' transmit phase compensation is frozen at the reflection
// the transceiver was tuned for; `rotation` holds those unit phasors.
struct FrozenTransceiver {
  RVec p;
  cplx a{1.0, 0.0};
  CVec rotation;  // per aggregation user, |rotation_k| = 1

  static FrozenTransceiver freeze(const TransceiverState& state, const CVec& current_channels, int num_airfl);
};

// Matrix-lifted problem data. For any unit-modulus phase vector with lifted
// rank-one V: tr(lifted_gain[i] V) is the combined channel gain,
// tr(lifted_signal[k] V) the received aggregation signal power, and
// tr(lifted_misalign[k] V) + 1 the alignment error of user k.
struct LiftedProblemData {
  int num_elements = 0;
  std::vector<CVec> phi_hat;           // per aggregation user, length M
  std::vector<CMat> lifted_gain;       // per user, (M+1)x(M+1)
  std::vector<CMat> lifted_signal;     // per aggregation user
  std::vector<CMat> lifted_misalign;   // per aggregation user
  double scaled_noise = 0.0;           // |a|^2 sigma^2
};

LiftedProblemData lift(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                       const NetworkConfig& cfg);

// Lifted vector [conj(u); 1] for a phase configuration u_m = e^{j theta_m}.
CVec lifted_vector(const ReflectionState& refl);

// Phase angles from a lifted vector (undoes the conjugation and the global
// phase carried by the last entry).
RVec theta_from_lifted(const CVec& vbar);

// Objective of the reflection subproblem at a given phase configuration:
// hybrid rate in bit/s with the transceiver frozen (identical to the lifted
// difference-of-logs evaluated at the rank-one point).
double reflection_score(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                        const NetworkConfig& cfg, const RVec& theta);

// Constraint slacks of a candidate under the frozen transceiver.
struct CandidateCheck {
  bool ordering = true;
  bool qos = true;
  bool mse = true;
  double qos_margin = 0.0;  // min_n gamma_n/zeta - 1 (when active)
  double mse_margin = 0.0;  // 1 - MSE/eps0 at the frozen scalar (when active)
  // Same slack after re-fitting the receive scalar magnitude to the
  // candidate (phases compensated); the restoration phase ranks by this.
  double mse_margin_refit = 0.0;
  bool ok() const { return ordering && qos && mse; }
};
CandidateCheck check_candidate(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                               const NetworkConfig& cfg, const RVec& theta);

struct ReflectionDcResult {
  convex::SolveStatus status = convex::SolveStatus::Optimal;
  CMat V;
  std::vector<double> objective_trace;  // true difference-of-logs value, bit/s
  double relaxation_bound = 0.0;        // upper bound on any feasible rank-one score, bit/s
  int iterations = 0;
  std::vector<RVec> eigenspectra;       // per iteration when diagnostics are on
  std::vector<std::string> relaxed_rows;
  std::string message;
};

struct ReflectionOptions {
  double dc_tolerance = 1e-6;
  int dc_max_iters = 20;
  int randomization_count = 50;
  int polish_passes = 2;
  std::uint64_t enumeration_cap = 1ULL << 20;
  int exhaustive_bit_threshold = 20;  // use exhaustive search when bits*elements is at or below this
  bool diagnostics = false;
  bool feasibility_objective = false;  // maximize received power instead of rate (restoration)
};

// Algorithm core: iterate the relaxed lifted problem, re-linearizing the
// subtracted concave part each round; the rank-one constraint is dropped.
ReflectionDcResult solve_relaxed_sdp(const LiftedProblemData& lifted, const FrozenTransceiver& txrx,
                                     const NetworkConfig& cfg, const CMat& V_init,
                                     const ReflectionOptions& opt = {});

// Rank-one recovery: exact factorization when the solution is numerically
// rank-one, otherwise Gaussian randomization shaped by V. Returns candidate
// phase configurations (the exact/leading one first).
std::vector<RVec> recover_rank_one(const CMat& V, int count, Rng& rng);

// Nearest admissible discrete phases, circular distance, ties toward the
// smaller set element.
ReflectionState quantize(const RVec& theta_continuous, int phase_bits);
inline ReflectionState quantize(const ReflectionState& refl, int phase_bits) {
  return quantize(refl.theta, phase_bits);
}

// Coordinate-wise continuous refinement of a candidate; infeasible moves are
// masked out.
RVec polish_phases(const ChannelRealization& rel, const FrozenTransceiver& txrx, const NetworkConfig& cfg,
                   RVec theta, int passes);

struct ExhaustiveResult {
  std::optional<ReflectionState> best;        // feasible score maximizer
  double best_score = 0.0;
  std::optional<ReflectionState> best_margin; // ordering-feasible max-margin candidate
  std::uint64_t enumerated = 0;
};

// Global discrete optimum for a fixed transceiver by enumerating all
// phase_levels^M patterns. Throws std::invalid_argument above the cap.
ExhaustiveResult exhaustive_search(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                                   const NetworkConfig& cfg, std::uint64_t cap = 1ULL << 20);

struct ReflectionStepResult {
  enum class Method { Exhaustive, RelaxThenQuantize, ContinuousRelax };
  Method method = Method::RelaxThenQuantize;
  std::optional<ReflectionState> reflection;
  double score = 0.0;
  double relaxation_bound = std::numeric_limits<double>::infinity();
  std::vector<double> dc_trace;
  std::vector<RVec> eigenspectra;
  bool used_fallback = false;  // no feasible candidate; caller keeps previous reflection
  std::string message;
};

// One full reflection update. Discrete mode picks exhaustive search at small
// sizes and relax-then-quantize otherwise; continuous mode skips quantization
// but keeps quantized candidates in the pool (they stay feasible).
ReflectionStepResult reflection_step(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                                     const NetworkConfig& cfg, const ReflectionState& current,
                                     ReflectionState::Mode mode, Rng& rng, const ReflectionOptions& opt = {});

}  // namespace hybridnet
