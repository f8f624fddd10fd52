#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hybridnet/experiments.hpp"

namespace {

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<hybridnet::SchemeSpec> parse_schemes(const std::string& s) {
  std::vector<hybridnet::SchemeSpec> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (!tok.empty()) out.push_back(hybridnet::SchemeSpec::from_label(tok));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided hybrid NOMA / over-the-air aggregation network simulator"};
  app.require_subcommand(1);

  std::string scenario_path, scheme_name = "discrete-ris", out_path, sweep_name = "num_elements";
  std::string grid_str = "5,10,15,20", schemes_str = "discrete-ris,random-ris", out_dir = "out";
  std::uint64_t seed = 1;
  int trials = 0, threads = 0;
  bool plots = false;

  auto* run = app.add_subcommand("run", "solve one scenario and print the iteration trace");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--scheme", scheme_name, "scheme label");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--out", out_path, "write the trace to this file instead of stdout");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over a scenario parameter");
  sweep->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--name", sweep_name,
                    "iterations | ris_y_coordinate | num_elements | power_budget_dbm | weight_lambda");
  sweep->add_option("--grid", grid_str, "comma-separated grid values");
  sweep->add_option("--trials", trials, "trials per grid point (default: scenario value)");
  sweep->add_option("--seed", seed, "random seed");
  sweep->add_option("--schemes", schemes_str, "comma-separated scheme labels");
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
  sweep->add_flag("--plots", plots, "emit SVG charts next to the CSVs");

  auto* plot = app.add_subcommand("plot", "re-render a chart from a summary CSV");
  std::string summary_path, plot_out = "plot.svg", plot_title = "sweep";
  plot->add_option("--summary", summary_path, "summary CSV produced by sweep")->required();
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_option("--title", plot_title, "chart title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      hybridnet::NetworkConfig cfg = hybridnet::load_scenario_file(scenario_path);
      hybridnet::Rng rng(seed);
      cfg = hybridnet::place_users(cfg, rng);
      const auto rel = hybridnet::sample_channels(cfg, hybridnet::Rng::mix(seed, 1));
      const auto report = hybridnet::alternating_optimize(
          rel, cfg, hybridnet::SchemeSpec::from_label(scheme_name), hybridnet::Rng::mix(seed, 2));
      const std::string text = report.record_rows();
      if (out_path.empty())
        std::cout << text;
      else
        hybridnet::write_text_file(out_path, text);
      if (report.termination == hybridnet::SolveReport::Termination::Infeasible) {
        std::cerr << "scenario infeasible: " << report.message << "\n";
        return 2;
      }
      return 0;
    }
    if (sweep->parsed()) {
      hybridnet::NetworkConfig cfg = hybridnet::load_scenario_file(scenario_path);
      hybridnet::SweepSpec spec;
      spec.param = hybridnet::sweep_param_from_name(sweep_name);
      spec.grid = parse_grid(grid_str);
      spec.trials = trials > 0 ? trials : cfg.trials;
      spec.schemes = parse_schemes(schemes_str);
      spec.seed = seed;
      spec.threads = threads;
      const auto table = hybridnet::run_sweep(spec, cfg);
      hybridnet::write_results(table, out_dir, sweep_name, plots);
      int infeasible = 0;
      for (const auto& t : table.trials) infeasible += t.status == "infeasible" ? 1 : 0;
      std::cout << "wrote " << out_dir << "/" << sweep_name << "_summary.csv (" << table.summary.size()
                << " rows, " << table.trials.size() << " trials, " << infeasible << " infeasible)\n";
      return 0;
    }
    if (plot->parsed()) {
      const auto rows = hybridnet::parse_summary_csv(hybridnet::read_text_file(summary_path));
      hybridnet::write_text_file(plot_out, hybridnet::render_line_chart_svg(rows, plot_title));
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
