#pragma once

#include <string>
#include <vector>

#include "hybridnet/config.hpp"
#include "hybridnet/orchestrator.hpp"

namespace hybridnet {

enum class SweepParam { Iterations, RisY, NumElements, PowerBudgetDbm, WeightLambda };

std::string to_string(SweepParam p);
SweepParam sweep_param_from_name(const std::string& name);

struct SweepSpec {
  SweepParam param = SweepParam::NumElements;
  std::vector<double> grid;   // nonempty, sorted ascending
  int trials = 1;
  std::vector<SchemeSpec> schemes;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  OrchestratorOptions solver;

  void validate() const;
};

struct TrialRecord {
  double sweep_value = 0.0;
  std::string scheme;
  int trial = 0;
  std::string realization_hash;
  std::string status;  // converged | cap | infeasible
  double rate_hybrid = 0.0, rate_noma = 0.0, rate_airfl = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // objective per iteration (iterations sweep)
};

struct SummaryRow {
  double sweep_value = 0.0;
  std::string scheme;
  double mean_rate = 0.0;
  double std_err = 0.0;
  double mean_iters = 0.0;
};

struct ResultsTable {
  std::vector<SummaryRow> summary;
  std::vector<TrialRecord> trials;

  std::string summary_csv() const;
  std::string trials_csv() const;
};

std::vector<SummaryRow> parse_summary_csv(const std::string& text);

// Derives the per-point configuration: the RIS placement sweep re-derives the
// whole geometry (BS at the origin, users centered 60 m away, RIS on the
// line between them).
NetworkConfig config_for_point(const NetworkConfig& base, SweepParam param, double value);

// Monte Carlo sweep with common channel realizations across schemes at every
// (point, trial) pair. Trials run concurrently; rows come out in a fixed
// deterministic order regardless of scheduling.
ResultsTable run_sweep(const SweepSpec& spec, const NetworkConfig& base);

// Deterministic line chart, one series per scheme.
// Throws std::invalid_argument on an empty table.
std::string render_line_chart_svg(const std::vector<SummaryRow>& summary, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Writes <name>_summary.csv, <name>_trials.csv and (optionally) <name>.svg.
void write_results(const ResultsTable& table, const std::string& out_dir, const std::string& name,
                   bool with_plot);

}  // namespace hybridnet
