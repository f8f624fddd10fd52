#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hybridnet/util.hpp"

namespace hybridnet::convex {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

std::string to_string(SolveStatus s);

struct BackendSolution {
  SolveStatus status = SolveStatus::MaxIter;
  RVec x;           // vector-variable problems
  CMat V;           // lifted-matrix problems
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  std::string message;  // infeasibility certificate / diagnostics
};

// maximize c'x subject to A x <= b and lower <= x <= upper.
struct LinearProgram {
  RVec c;
  Eigen::MatrixXd A;  // may have zero rows
  RVec b;
  RVec lower, upper;
  std::vector<std::string> row_names;  // optional, used in diagnostics
};

// One smooth convex constraint row:
//   q'x + x'Q x / 2 + sum_k s_k sqrt(x_k) + r <= 0   with Q >= 0, s <= 0.
struct SmoothRow {
  RVec q;
  Eigen::MatrixXd Q;  // empty means no quadratic part
  RVec s;             // empty means no sqrt part; entries must be <= 0
  double r = 0.0;
  std::string name;
};

// maximize sum_j w_j ln(a_j'x + b_j) + c'x + x'Q x / 2 (Q <= 0)
// subject to SmoothRow constraints and box bounds. Solved by a log-barrier
// damped-Newton scheme; a phase-1 pass builds a strictly feasible start when
// the caller does not supply one.
struct SmoothProgram {
  struct LogTerm {
    double w = 1.0;
    RVec a;
    double b = 0.0;
  };
  int dim = 0;
  std::vector<LogTerm> logs;
  RVec c;             // empty means zero
  Eigen::MatrixXd Q;  // empty means zero; must be negative semidefinite
  std::vector<SmoothRow> rows;
  RVec lower, upper;  // +-inf allowed
  RVec x_init;        // optional warm start
};

using ConvexProblem = std::variant<LinearProgram, SmoothProgram>;

struct SolveOptions {
  double tolerance = 1e-7;
  int max_iters = 200;
};

BackendSolution solve(const LinearProgram& lp, const SolveOptions& opt = {});
BackendSolution solve(const SmoothProgram& sp, const SolveOptions& opt = {});
BackendSolution solve(const ConvexProblem& problem, const SolveOptions& opt = {});

// Exhaustive reference optimum for tiny instances; test oracle only.
// Linear programs are solved by vertex enumeration (<= 3 free variables),
// smooth programs by grid search at the given resolution over the box.
BackendSolution brute_force_oracle(const ConvexProblem& problem, double grid_resolution);

// Human-readable dump for offline inspection of emitted instances.
std::string dump(const ConvexProblem& problem);

}  // namespace hybridnet::convex
