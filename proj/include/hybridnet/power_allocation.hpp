#pragma once

#include <string>
#include <vector>

#include "hybridnet/config.hpp"
#include "hybridnet/util.hpp"

namespace hybridnet {

enum class PowerStatus { Converged, CapReached, Infeasible };

struct NomaPowerResult {
  PowerStatus status = PowerStatus::Converged;
  RVec p_noma;          // amplitudes for communication users, decode order
  int violated_user = -1;  // global index of the first unsatisfiable QoS row
  std::string message;
};

struct AirflPowerResult {
  PowerStatus status = PowerStatus::Converged;
  RVec p_airfl;
  std::vector<double> objective_trace;  // hybrid-rate values per DC iterate
  int iterations = 0;
  std::string message;
};

struct PowerAllocationResult {
  PowerStatus status = PowerStatus::Converged;
  RVec p;  // all users, decode order
  std::vector<double> objective_trace;  // hybrid rate per accepted outer step
  int iterations = 0;
  std::string message;
};

struct PowerOptions {
  double tolerance = 1e-6;  // relative hybrid-rate improvement
  int max_iters = 30;
};

// Communication-user powers with aggregation powers held fixed. With the
// substitution rho = p^2 the grouped sum-rate objective is monotone in
// sum rho_n g_n, so this is a linear program over the QoS rows and boxes.
NomaPowerResult solve_noma_power(const RVec& gains, const RVec& p_airfl_fixed, const NetworkConfig& cfg);

// Aggregation-user powers with communication powers held fixed: difference-of-
// convex iteration in rho with the subtracted part linearized each round.
// Transmit phases are absorbed, so alignment terms read (|a| sqrt(g_k rho_k) - 1)^2.
AirflPowerResult solve_airfl_power(const RVec& gains, cplx a, const RVec& p_noma_fixed, const RVec& init,
                                   const NetworkConfig& cfg, const PowerOptions& opt = {});

// Full power step: closed-form full power when no rate floor is set,
// otherwise alternation of the two blocks with a non-decrease guard.
PowerAllocationResult allocate_power(const RVec& gains, cplx a, const RVec& init, const NetworkConfig& cfg,
                                     const PowerOptions& opt = {});

// Least powers able to satisfy the QoS cascade given fixed aggregation
// interference; used for feasibility screening and diagnostics.
struct QosCascade {
  bool feasible = true;
  RVec rho_min;  // per communication user
  int violated_user = -1;
};
QosCascade qos_min_powers(const RVec& gains, const RVec& p_airfl_fixed, const NetworkConfig& cfg);

// Smallest achievable sum of alignment errors (plus |a|^2 sigma^2) over the
// power box; screens the aggregation-error constraint for a fixed scalar.
double min_aggregation_error(const RVec& gains, double a_abs, const NetworkConfig& cfg, RVec* rho_opt = nullptr);

}  // namespace hybridnet
