#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hybridnet/channel.hpp"
#include "hybridnet/config.hpp"
#include "hybridnet/metrics.hpp"
#include "hybridnet/power_allocation.hpp"
#include "hybridnet/receive_control.hpp"
#include "hybridnet/reflection_design.hpp"

namespace hybridnet {

struct SchemeSpec {
  enum class Kind { DiscreteRis, ContinuousRis, RandomRis, RelaxedQos, RelaxedMse };
  Kind kind = Kind::DiscreteRis;

  std::string label() const;
  static SchemeSpec from_label(const std::string& name);
  static std::vector<SchemeSpec> all();

  // Constraint overrides realized by the scheme.
  NetworkConfig apply(const NetworkConfig& cfg) const;
  bool freeze_reflection() const { return kind == Kind::RandomRis; }
  ReflectionState::Mode reflection_mode() const {
    return kind == Kind::ContinuousRis ? ReflectionState::Mode::Continuous : ReflectionState::Mode::Discrete;
  }
};

struct Initialization {
  ReflectionState reflection;
  TransceiverState transceiver;
};

struct SolveReport {
  enum class Termination { Tolerance, Cap, Infeasible };

  std::string scheme;
  TransceiverState transceiver;           // decode order
  ReflectionState reflection;
  std::vector<int> user_order;            // decode-order permutation of input users
  std::vector<double> objective_trace;    // hybrid rate per outer iteration, index 0 = initial point
  std::vector<std::vector<double>> power_traces;
  std::vector<std::vector<double>> scalar_traces;
  std::vector<std::vector<double>> reflection_traces;
  int iterations = 0;
  Termination termination = Termination::Tolerance;
  bool step2_skipped = false;
  bool feasible_final = false;
  bool restoration_used = false;
  double wall_ms_power = 0, wall_ms_scalar = 0, wall_ms_reflection = 0;
  double analytic_upper_bound = 0.0;
  RateBreakdown final_breakdown;
  std::string message;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
  std::string record_rows() const;  // line-oriented: one row per iteration
};

struct OrchestratorOptions {
  double tolerance = 1e-6;  // relative objective change
  int max_iters = 50;
  int init_retries = 100;
  int restoration_rounds = 4;
  ReflectionOptions reflection;
  PowerOptions power;
  ScalarOptions scalar;
};

// Three-block alternating optimization: power allocation, receive scalar,
// reflection design, each accepted only when the hybrid rate does not
// decrease. The realization's users may arrive in any order; they are
// relabeled into decode order internally.
SolveReport alternating_optimize(const ChannelRealization& rel, const NetworkConfig& cfg,
                                 const SchemeSpec& scheme, std::uint64_t seed,
                                 std::optional<Initialization> init = std::nullopt,
                                 const OrchestratorOptions& opt = {});

// Runs every scheme from one shared initialization on the same realization.
// Schemes that relax the baseline's constraint set are re-run from the
// baseline's final point when a heuristic trajectory lands below it, so
// relaxation dominance holds on every seed.
std::vector<SolveReport> run_scheme_suite(const ChannelRealization& rel, const NetworkConfig& cfg,
                                          const std::vector<SchemeSpec>& schemes, std::uint64_t seed,
                                          const OrchestratorOptions& opt = {});

}  // namespace hybridnet
