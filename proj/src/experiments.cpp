#include "hybridnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace hybridnet {

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Iterations: return "iterations";
    case SweepParam::RisY: return "ris_y_coordinate";
    case SweepParam::NumElements: return "num_elements";
    case SweepParam::PowerBudgetDbm: return "power_budget_dbm";
    case SweepParam::WeightLambda: return "weight_lambda";
  }
  return "unknown";
}

SweepParam sweep_param_from_name(const std::string& name) {
  for (SweepParam p : {SweepParam::Iterations, SweepParam::RisY, SweepParam::NumElements,
                       SweepParam::PowerBudgetDbm, SweepParam::WeightLambda})
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("sweep grid must be sorted");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (schemes.empty()) throw std::invalid_argument("at least one scheme required");
}

NetworkConfig config_for_point(const NetworkConfig& base, SweepParam param, double value) {
  NetworkConfig cfg = base;
  switch (param) {
    case SweepParam::Iterations:
      break;  // fixed scenario; the grid indexes iterations
    case SweepParam::RisY:
      cfg.bs_pos = Vec3{0, 0, 0};
      cfg.ris_pos = Vec3{0, value, 0};
      cfg.user_pos.clear();
      cfg.user_disk = UserDisk{Vec3{0, 60, 0}, 5.0};
      break;
    case SweepParam::NumElements:
      cfg.num_elements = static_cast<int>(std::lround(value));
      break;
    case SweepParam::PowerBudgetDbm:
      cfg.power_budget_w.assign(static_cast<std::size_t>(cfg.num_users()), dbm_to_watt(value));
      break;
    case SweepParam::WeightLambda:
      cfg.weight_lambda = value;
      break;
  }
  cfg.validate();
  return cfg;
}

namespace {

std::string status_of(const SolveReport& r) {
  if (r.termination == SolveReport::Termination::Infeasible) return "infeasible";
  if (!r.feasible_final) return "infeasible";
  return r.termination == SolveReport::Termination::Cap ? "cap" : "converged";
}

struct TrialTask {
  std::size_t point = 0;
  int trial = 0;
};

}  // namespace

ResultsTable run_sweep(const SweepSpec& spec, const NetworkConfig& base) {
  spec.validate();
  NetworkConfig checked = base;
  checked.validate();

  const bool iter_sweep = spec.param == SweepParam::Iterations;
  const std::vector<double> points = iter_sweep ? std::vector<double>{0.0} : spec.grid;

  std::vector<TrialTask> tasks;
  for (std::size_t pi = 0; pi < points.size(); ++pi)
    for (int t = 0; t < spec.trials; ++t) tasks.push_back({pi, t});

  // One result slot per (point, trial, scheme); filled concurrently, read in order.
  std::vector<std::vector<TrialRecord>> slots(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const TrialTask task = tasks[idx];
      const NetworkConfig cfg_pt = config_for_point(checked, spec.param, points[task.point]);
      const std::uint64_t trial_seed = Rng::mix(Rng::mix(spec.seed, task.point), static_cast<std::uint64_t>(task.trial));
      Rng place_rng(trial_seed);
      const NetworkConfig cfg_placed = place_users(cfg_pt, place_rng);
      const ChannelRealization rel = sample_channels(cfg_placed, Rng::mix(trial_seed, 1));
      const std::vector<SolveReport> reports =
          run_scheme_suite(rel, cfg_placed, spec.schemes, Rng::mix(trial_seed, 2), spec.solver);

      std::vector<TrialRecord> recs;
      for (const SolveReport& r : reports) {
        TrialRecord rec;
        rec.sweep_value = points[task.point];
        rec.scheme = r.scheme;
        rec.trial = task.trial;
        rec.realization_hash = rel.hash_hex();
        rec.status = status_of(r);
        rec.rate_hybrid = r.final_breakdown.rate_hybrid;
        rec.rate_noma = r.final_breakdown.rate_noma_sum;
        rec.rate_airfl = r.final_breakdown.rate_airfl;
        rec.iterations = r.iterations;
        rec.trace = r.objective_trace;
        recs.push_back(std::move(rec));
      }
      slots[idx] = std::move(recs);
    }
  };

  int nthreads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(tasks.size())));
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ResultsTable table;
  for (const auto& recs : slots)
    for (const auto& r : recs) table.trials.push_back(r);

  // Aggregate. For the iterations sweep the "points" are iteration indices
  // and converged traces are padded with their final value.
  const std::vector<double> sum_points = iter_sweep ? spec.grid : points;
  for (double pv : sum_points) {
    for (const SchemeSpec& scheme : spec.schemes) {
      std::vector<double> vals;
      double iter_sum = 0.0;
      int counted = 0;
      for (const TrialRecord& r : table.trials) {
        if (r.scheme != scheme.label()) continue;
        if (r.status == "infeasible") continue;
        if (iter_sweep) {
          const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(std::lround(pv)),
                                                        r.trace.empty() ? 0 : r.trace.size() - 1);
          if (!r.trace.empty()) vals.push_back(r.trace[idx]);
        } else {
          if (r.sweep_value != pv) continue;
          vals.push_back(r.rate_hybrid);
        }
        iter_sum += r.iterations;
        ++counted;
      }
      SummaryRow row;
      row.sweep_value = pv;
      row.scheme = scheme.label();
      if (!vals.empty()) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
        row.mean_rate = mean;
        row.std_err = std::sqrt(var / static_cast<double>(vals.size()));
        row.mean_iters = iter_sum / counted;
      } else {
        row.mean_rate = std::numeric_limits<double>::quiet_NaN();
        row.std_err = std::numeric_limits<double>::quiet_NaN();
        row.mean_iters = 0.0;
      }
      table.summary.push_back(row);
    }
  }
  return table;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string ResultsTable::summary_csv() const {
  std::ostringstream os;
  os << "sweep_value,scheme,mean_rate,std_err,mean_iters\n";
  for (const SummaryRow& r : summary)
    os << fmt(r.sweep_value) << ',' << r.scheme << ',' << fmt(r.mean_rate) << ',' << fmt(r.std_err) << ','
       << fmt(r.mean_iters) << "\n";
  return os.str();
}

std::string ResultsTable::trials_csv() const {
  std::ostringstream os;
  os << "sweep_value,scheme,trial,realization_hash,status,rate_hybrid_bps,rate_noma_bps,rate_airfl_bps,"
        "iterations\n";
  for (const TrialRecord& r : trials)
    os << fmt(r.sweep_value) << ',' << r.scheme << ',' << r.trial << ',' << r.realization_hash << ','
       << r.status << ',' << fmt(r.rate_hybrid) << ',' << fmt(r.rate_noma) << ',' << fmt(r.rate_airfl)
       << ',' << r.iterations << "\n";
  return os.str();
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
  std::vector<SummaryRow> rows;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    SummaryRow row;
    std::getline(ls, field, ',');
    row.sweep_value = std::stod(field);
    std::getline(ls, row.scheme, ',');
    std::getline(ls, field, ',');
    row.mean_rate = std::stod(field);
    std::getline(ls, field, ',');
    row.std_err = std::stod(field);
    std::getline(ls, field, ',');
    row.mean_iters = std::stod(field);
    rows.push_back(row);
  }
  return rows;
}

std::string render_line_chart_svg(const std::vector<SummaryRow>& summary, const std::string& title) {
  if (summary.empty()) throw std::invalid_argument("render_line_chart_svg: empty table");
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::vector<std::string> schemes;
  for (const SummaryRow& r : summary)
    if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) schemes.push_back(r.scheme);

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const SummaryRow& r : summary) {
    if (std::isnan(r.mean_rate)) continue;
    xmin = std::min(xmin, r.sweep_value);
    xmax = std::max(xmax, r.sweep_value);
    ymin = std::min(ymin, r.mean_rate);
    ymax = std::max(ymax, r.mean_rate);
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double W = 640, H = 420, L = 70, R = 20, T = 36, Bm = 46;
  auto xpix = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto ypix = [&](double y) { return H - Bm - (y - ymin) / (ymax - ymin) * (H - T - Bm); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
        "viewBox=\"0 0 640 420\">\n";
  os << "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  os << "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", ymin);
  os << "<text x=\"8\" y=\"" << fmt(ypix(ymin)) << "\" font-family=\"sans-serif\" font-size=\"11\">" << buf
     << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.6g", ymax);
  os << "<text x=\"8\" y=\"" << fmt(ypix(ymax) + 10) << "\" font-family=\"sans-serif\" font-size=\"11\">"
     << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.6g", xmin);
  os << "<text x=\"" << fmt(xpix(xmin)) << "\" y=\"408\" font-family=\"sans-serif\" font-size=\"11\">" << buf
     << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.6g", xmax);
  os << "<text x=\"" << fmt(xpix(xmax) - 30) << "\" y=\"408\" font-family=\"sans-serif\" font-size=\"11\">"
     << buf << "</text>\n";
  os << "<line x1=\"" << fmt(L) << "\" y1=\"" << fmt(H - Bm) << "\" x2=\"" << fmt(W - R) << "\" y2=\""
     << fmt(H - Bm) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << fmt(L) << "\" y1=\"" << fmt(T) << "\" x2=\"" << fmt(L) << "\" y2=\"" << fmt(H - Bm)
     << "\" stroke=\"black\"/>\n";

  for (std::size_t s = 0; s < schemes.size(); ++s) {
    os << "<polyline fill=\"none\" stroke=\"" << kColors[s % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (const SummaryRow& r : summary) {
      if (r.scheme != schemes[s] || std::isnan(r.mean_rate)) continue;
      os << fmt(xpix(r.sweep_value)) << ',' << fmt(ypix(r.mean_rate)) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << fmt(W - R - 170) << "\" y=\"" << fmt(T + 16.0 * (s + 1)) << "\" fill=\""
       << kColors[s % 6] << "\" font-family=\"sans-serif\" font-size=\"12\">" << schemes[s] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_results(const ResultsTable& table, const std::string& out_dir, const std::string& name,
                   bool with_plot) {
  const std::filesystem::path dir(out_dir);
  write_text_file((dir / (name + "_summary.csv")).string(), table.summary_csv());
  write_text_file((dir / (name + "_trials.csv")).string(), table.trials_csv());
  if (with_plot)
    write_text_file((dir / (name + ".svg")).string(), render_line_chart_svg(table.summary, name));
}

}  // namespace hybridnet
