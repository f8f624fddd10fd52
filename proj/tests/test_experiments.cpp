#include <doctest.h>

#include <filesystem>
#include <map>

#include "hybridnet/experiments.hpp"

using namespace hybridnet;

namespace {

NetworkConfig sweep_base(int M = 6) {
  NetworkConfig cfg;
  cfg.num_airfl = 2;
  cfg.num_noma = 1;
  cfg.num_elements = M;
  cfg.phase_bits = 2;
  cfg.bandwidth_hz = 1e6;
  cfg.noise_power_w = dbm_to_watt(-80.0);
  cfg.weight_lambda = 0.5;
  cfg.min_rate_bps = 0.0;
  cfg.mse_tolerance = std::numeric_limits<double>::infinity();
  cfg.power_budget_w.assign(3, dbm_to_watt(23.0));
  cfg.user_disk = UserDisk{Vec3{5, 50, 0}, 3.0};
  cfg.trials = 2;
  cfg.validate();
  return cfg;
}

SweepSpec tiny_spec(SweepParam param, std::vector<double> grid, int trials = 2) {
  SweepSpec spec;
  spec.param = param;
  spec.grid = std::move(grid);
  spec.trials = trials;
  spec.schemes = {SchemeSpec{SchemeSpec::Kind::DiscreteRis}, SchemeSpec{SchemeSpec::Kind::RandomRis}};
  spec.seed = 5;
  spec.threads = 2;
  return spec;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("sweep parameter names round-trip") {
    for (const char* name : {"iterations", "ris_y_coordinate", "num_elements", "power_budget_dbm",
                             "weight_lambda"})
      CHECK(to_string(sweep_param_from_name(name)) == name);
    CHECK_THROWS_AS(sweep_param_from_name("bogus"), std::invalid_argument);
  }

  TEST_CASE("spec validation rejects bad grids") {
    SweepSpec spec = tiny_spec(SweepParam::NumElements, {});
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.grid = {10, 5};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.grid = {5, 10};
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  }

  TEST_CASE("placement sweep re-derives the geometry") {
    const NetworkConfig cfg = config_for_point(sweep_base(), SweepParam::RisY, 30.0);
    CHECK(cfg.bs_pos.x == 0.0);
    CHECK(cfg.bs_pos.y == 0.0);
    CHECK(cfg.ris_pos.y == 30.0);
    REQUIRE(cfg.user_disk.has_value());
    CHECK(cfg.user_disk->center.y == 60.0);
    CHECK(cfg.user_disk->radius == 5.0);
    CHECK(config_for_point(sweep_base(), SweepParam::NumElements, 12).num_elements == 12);
    CHECK(config_for_point(sweep_base(), SweepParam::WeightLambda, 0.25).weight_lambda == 0.25);
    const NetworkConfig p = config_for_point(sweep_base(), SweepParam::PowerBudgetDbm, 20.0);
    CHECK(p.power_budget(0) == doctest::Approx(dbm_to_watt(20.0)).epsilon(1e-14));
  }

  TEST_CASE("single point single trial yields one row per scheme") {
    const SweepSpec spec = tiny_spec(SweepParam::NumElements, {4.0}, 1);
    const ResultsTable table = run_sweep(spec, sweep_base(4));
    CHECK(table.summary.size() == 2);
    CHECK(table.trials.size() == 2);
    const std::string csv = table.summary_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    CHECK(csv.rfind("sweep_value,scheme,mean_rate,std_err,mean_iters", 0) == 0);
  }

  TEST_CASE("schemes at one grid point share the channel realization") {
    const SweepSpec spec = tiny_spec(SweepParam::NumElements, {4.0, 6.0}, 2);
    const ResultsTable table = run_sweep(spec, sweep_base(4));
    std::map<std::pair<double, int>, std::map<std::string, std::string>> hashes;
    for (const TrialRecord& r : table.trials)
      hashes[{r.sweep_value, r.trial}][r.scheme] = r.realization_hash;
    for (const auto& [key, per_scheme] : hashes) {
      REQUIRE(per_scheme.size() == 2);
      CHECK(per_scheme.at("discrete-ris") == per_scheme.at("random-ris"));
    }
    // Distinct trials use distinct channels.
    CHECK(hashes[{4.0, 0}]["discrete-ris"] != hashes[{4.0, 1}]["discrete-ris"]);
  }

  TEST_CASE("optimized reflection beats the frozen random one on average") {
    SweepSpec spec = tiny_spec(SweepParam::NumElements, {6.0}, 4);
    const ResultsTable table = run_sweep(spec, sweep_base(6));
    double opt = 0, rnd = 0;
    for (const SummaryRow& r : table.summary) {
      if (r.scheme == "discrete-ris") opt = r.mean_rate;
      if (r.scheme == "random-ris") rnd = r.mean_rate;
    }
    CHECK(opt > rnd);
  }

  TEST_CASE("iterations sweep reports the padded mean trace") {
    SweepSpec spec = tiny_spec(SweepParam::Iterations, {0, 1, 2, 3, 4, 5}, 2);
    spec.schemes = {SchemeSpec{SchemeSpec::Kind::DiscreteRis}};
    const ResultsTable table = run_sweep(spec, sweep_base(4));
    REQUIRE(table.summary.size() == 6);
    for (std::size_t i = 1; i < table.summary.size(); ++i)
      CHECK(table.summary[i].mean_rate >= table.summary[i - 1].mean_rate - 1e-9);
  }

  TEST_CASE("plots are deterministic and survive csv re-ingestion") {
    const SweepSpec spec = tiny_spec(SweepParam::NumElements, {4.0, 6.0}, 1);
    const ResultsTable table = run_sweep(spec, sweep_base(4));
    const std::string svg1 = render_line_chart_svg(table.summary, "num_elements");
    const std::string svg2 = render_line_chart_svg(table.summary, "num_elements");
    CHECK(svg1 == svg2);
    CHECK(svg1.find("<polyline") != std::string::npos);
    CHECK(svg1.find("discrete-ris") != std::string::npos);
    CHECK(svg1.find("random-ris") != std::string::npos);

    const std::vector<SummaryRow> reread = parse_summary_csv(table.summary_csv());
    const std::string svg3 = render_line_chart_svg(reread, "num_elements");
    CHECK(svg1 == svg3);

    CHECK_THROWS_AS(render_line_chart_svg({}, "empty"), std::invalid_argument);
  }

  TEST_CASE("results land on disk with stable names") {
    const SweepSpec spec = tiny_spec(SweepParam::NumElements, {4.0}, 1);
    const ResultsTable table = run_sweep(spec, sweep_base(4));
    const std::string dir = (std::filesystem::temp_directory_path() / "hybridnet_test_out").string();
    std::filesystem::remove_all(dir);
    write_results(table, dir, "num_elements", true);
    CHECK(std::filesystem::exists(dir + "/num_elements_summary.csv"));
    CHECK(std::filesystem::exists(dir + "/num_elements_trials.csv"));
    CHECK(std::filesystem::exists(dir + "/num_elements.svg"));
    const std::string back = read_text_file(dir + "/num_elements_summary.csv");
    CHECK(back == table.summary_csv());
  }
}
