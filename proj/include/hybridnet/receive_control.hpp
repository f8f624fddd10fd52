#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hybridnet/config.hpp"
#include "hybridnet/util.hpp"

namespace hybridnet {

// Closed-form receive scalar for the unconstrained case: K / sum_k hbar_k p_k.
// Throws std::domain_error when the sum is (numerically) zero.
cplx closed_form_scalar(const CVec& airfl_channels, const RVec& p_airfl);

struct ScalarSolveResult {
  enum class Status { Converged, CapReached, Infeasible };
  Status status = Status::Converged;
  cplx a{0.0, 0.0};
  int iterations = 0;
  std::vector<double> rate_trace;       // computation rate per accepted iterate
  std::vector<double> objective_trace;  // sum_k |abar - hbar_k p_k|^2 per iterate
  std::string message;
};

struct ScalarOptions {
  double tolerance = 1e-6;  // relative change of the computation rate
  int max_iters = 30;
};

// Receive scalar under the aggregation-error constraint. Each iteration
// minimizes the alignment objective subject to the constraint with |abar|^2
// replaced by its first-order expansion; the single-scalar subproblem is
// solved exactly by stationarity plus a dual bisection. Accepted iterates
// satisfy the original constraint. With an infinite tolerance the closed
// form above is returned directly.
ScalarSolveResult sca_scalar(const CVec& airfl_channels, const RVec& p_airfl, const NetworkConfig& cfg,
                             std::optional<cplx> init = std::nullopt, const ScalarOptions& opt = {});

}  // namespace hybridnet
