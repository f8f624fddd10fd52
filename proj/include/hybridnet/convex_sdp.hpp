#pragma once

#include <string>
#include <vector>

#include "hybridnet/convex_backend.hpp"
#include "hybridnet/util.hpp"

namespace hybridnet::convex {

// maximize sum_j w_j ln(tr(A_j V) + b_j) + tr(C V)
// over Hermitian V >= 0 with unit diagonal and rows tr(R_t V) <= c_t.
// A_j, R_t, C are Hermitian; every trace is real.
struct SdpLogTerm {
  double w = 1.0;
  CMat A;
  double b = 0.0;
};

struct SdpRow {
  CMat R;
  double c = 0.0;
  std::string name;
};

struct SdpLogProgram {
  int dim = 0;
  std::vector<SdpLogTerm> logs;
  CMat C;      // empty means zero
  CMat V_init; // optional warm start; blended toward identity for strictness
  // Initial barrier weight as a fraction of the objective scale. Re-solves
  // from an interior V_init can start small and skip most of the annealing.
  double mu0_fraction = 0.1;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::MaxIter;
  CMat V;
  double objective = 0.0;
  int newton_steps = 0;
  double barrier_gap = 0.0;               // upper-bound slack of the returned objective
  std::vector<double> row_relaxation;     // how much each row had to be loosened at the start
  std::string message;
};

// Interior-point solve with the unit diagonal eliminated by construction and
// the PSD cone handled through a log-det barrier. Row constraints that the
// (blended) starting point violates are loosened just enough to start; the
// relaxation amounts are reported so callers can check the true rows.
SdpSolution solve_sdp(const SdpLogProgram& prog, const std::vector<SdpRow>& rows,
                      const SolveOptions& opt = {});

}  // namespace hybridnet::convex
