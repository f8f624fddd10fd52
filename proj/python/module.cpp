#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridnet/experiments.hpp"

namespace py = pybind11;
using namespace hybridnet;

namespace {

py::dict report_to_dict(const SolveReport& r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["objective_trace"] = r.objective_trace;
  d["iterations"] = r.iterations;
  d["rate_hybrid"] = r.final_breakdown.rate_hybrid;
  d["rate_noma"] = r.final_breakdown.rate_noma_sum;
  d["rate_airfl"] = r.final_breakdown.rate_airfl;
  d["mse"] = r.final_breakdown.mse;
  d["feasible"] = r.feasible_final;
  d["termination"] = r.termination == SolveReport::Termination::Tolerance
                         ? "tolerance"
                         : (r.termination == SolveReport::Termination::Cap ? "cap" : "infeasible");
  std::vector<double> theta(r.reflection.theta.begin(), r.reflection.theta.end());
  d["theta"] = theta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hybridnet, m) {
  m.doc() = "RIS-aided hybrid NOMA / over-the-air aggregation network simulator";

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("num_airfl", &NetworkConfig::num_airfl)
      .def_readwrite("num_noma", &NetworkConfig::num_noma)
      .def_readwrite("num_elements", &NetworkConfig::num_elements)
      .def_readwrite("phase_bits", &NetworkConfig::phase_bits)
      .def_readwrite("bandwidth_hz", &NetworkConfig::bandwidth_hz)
      .def_readwrite("noise_power_w", &NetworkConfig::noise_power_w)
      .def_readwrite("min_rate_bps", &NetworkConfig::min_rate_bps)
      .def_readwrite("mse_tolerance", &NetworkConfig::mse_tolerance)
      .def_readwrite("weight_lambda", &NetworkConfig::weight_lambda)
      .def_readwrite("rician_factor", &NetworkConfig::rician_factor)
      .def_readwrite("trials", &NetworkConfig::trials)
      .def("validate", &NetworkConfig::validate);

  m.def("load_scenario", &scenario_from_json_text, py::arg("json_text"),
        "Parse a scenario from JSON text (dBm/watt unit keys honored).");
  m.def("scenario_json", &scenario_to_json_text, py::arg("config"));
  m.def("path_loss", &path_loss, py::arg("distance_m"), py::arg("config"));
  m.def("dbm_to_watt", &dbm_to_watt);

  m.def(
      "quantize_phases",
      [](const std::vector<double>& theta, int bits) {
        RVec t(static_cast<Eigen::Index>(theta.size()));
        for (std::size_t i = 0; i < theta.size(); ++i) t[static_cast<Eigen::Index>(i)] = theta[i];
        const ReflectionState q = quantize(t, bits);
        return std::vector<double>(q.theta.begin(), q.theta.end());
      },
      py::arg("theta"), py::arg("phase_bits"));

  m.def(
      "solve",
      [](NetworkConfig cfg, const std::string& scheme, std::uint64_t seed) {
        Rng rng(seed);
        cfg = place_users(cfg, rng);
        const ChannelRealization rel = sample_channels(cfg, Rng::mix(seed, 1));
        return report_to_dict(
            alternating_optimize(rel, cfg, SchemeSpec::from_label(scheme), Rng::mix(seed, 2)));
      },
      py::arg("config"), py::arg("scheme") = "discrete-ris", py::arg("seed") = 1);

  m.def(
      "sweep",
      [](NetworkConfig cfg, const std::string& name, const std::vector<double>& grid, int trials,
         const std::vector<std::string>& schemes, std::uint64_t seed) {
        SweepSpec spec;
        spec.param = sweep_param_from_name(name);
        spec.grid = grid;
        spec.trials = trials;
        for (const auto& s : schemes) spec.schemes.push_back(SchemeSpec::from_label(s));
        spec.seed = seed;
        const ResultsTable table = run_sweep(spec, cfg);
        py::list rows;
        for (const SummaryRow& r : table.summary) {
          py::dict d;
          d["sweep_value"] = r.sweep_value;
          d["scheme"] = r.scheme;
          d["mean_rate"] = r.mean_rate;
          d["std_err"] = r.std_err;
          d["mean_iters"] = r.mean_iters;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), py::arg("name"), py::arg("grid"), py::arg("trials"), py::arg("schemes"),
      py::arg("seed") = 1);
}
