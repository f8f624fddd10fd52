// Acceptance suite: end-to-end checks of the solver stack at desk scale.
// Each criterion prints one PASS/FAIL line; the exit code is the number of
// failed criteria.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hybridnet/convex_backend.hpp"
#include "hybridnet/experiments.hpp"
#include "hybridnet/orchestrator.hpp"

using namespace hybridnet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
void parallel_for(int n, F&& body, int threads = 2) {
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double secs) {
  std::printf("[%s] criterion %2d: %s (%s; %.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

NetworkConfig base_config(int K, int N, int M, int bits, double lambda, double min_rate, double eps0,
                          double power_dbm = 23.0) {
  NetworkConfig cfg;
  cfg.num_airfl = K;
  cfg.num_noma = N;
  cfg.num_elements = M;
  cfg.phase_bits = bits;
  cfg.bandwidth_hz = 1e6;
  cfg.noise_power_w = dbm_to_watt(-80.0);
  cfg.weight_lambda = lambda;
  cfg.min_rate_bps = min_rate;
  cfg.mse_tolerance = eps0;
  cfg.power_budget_w.assign(static_cast<std::size_t>(K + N), dbm_to_watt(power_dbm));
  cfg.bs_pos = Vec3{5, 0, 15};
  cfg.ris_pos = Vec3{0, 40, 15};
  cfg.user_disk = UserDisk{Vec3{5, 50, 0}, 3.0};
  cfg.validate();
  return cfg;
}

NetworkConfig unit_scale_config(int K, int N, int M) {
  NetworkConfig cfg;
  cfg.num_airfl = K;
  cfg.num_noma = N;
  cfg.num_elements = M;
  cfg.phase_bits = 2;
  cfg.bandwidth_hz = 1e6;
  cfg.noise_power_w = 0.5;
  cfg.weight_lambda = 0.5;
  cfg.min_rate_bps = 0.0;
  cfg.mse_tolerance = 1e9;
  cfg.path_loss_ref = 1.0;
  cfg.bs_pos = Vec3{1, 0, 0};
  cfg.ris_pos = Vec3{0, 0, 0};
  cfg.power_budget_w.assign(static_cast<std::size_t>(K + N), 1.0);
  for (int i = 0; i < K + N; ++i) cfg.user_pos.push_back(Vec3{0, 1.0 + 0.05 * i, 0});
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Lifted-trace identities.
void criterion_lemmas() {
  const auto t0 = Clock::now();
  std::atomic<bool> pass{true};
  std::mutex mu;
  double max_err = 0.0;
  for (int M : {1, 2, 4, 8}) {
    parallel_for(4, [&](int part) {
      Rng rng(Rng::mix(900 + M, part));
      NetworkConfig cfg = unit_scale_config(2, 1, M);
      double local_err = 0.0;
      for (int c = 0; c < 50; ++c) {
        const ChannelRealization rel = sample_channels(cfg, Rng::mix(part * 1000 + c, M));
        FrozenTransceiver txrx;
        txrx.p.resize(3);
        for (int i = 0; i < 3; ++i) txrx.p[i] = rng.uniform(0.2, 1.2);
        txrx.a = 1.5 * rng.cgauss();
        txrx.rotation.resize(2);
        for (int k = 0; k < 2; ++k) txrx.rotation[k] = std::polar(1.0, rng.uniform(0.0, kTwoPi));
        const LiftedProblemData lifted = lift(rel, txrx, cfg);
        for (int rep = 0; rep < 5; ++rep) {
          RVec theta(M);
          for (int m = 0; m < M; ++m) theta[m] = rng.uniform(0.0, kTwoPi);
          ReflectionState refl{theta, ReflectionState::Mode::Continuous};
          const CVec vbar = lifted_vector(refl);
          const CMat V = vbar * vbar.adjoint();
          const CVec hbar = combined_channel(rel, refl);
          for (int i = 0; i < 3; ++i) {
            const double tr = (lifted.lifted_gain[i].cwiseProduct(V.transpose())).sum().real();
            local_err = std::max(local_err, std::fabs(tr - std::norm(hbar[i])));
          }
          for (int k = 0; k < 2; ++k) {
            const cplx prod = txrx.a * hbar[k] * txrx.p[k] * txrx.rotation[k];
            const double ts = (lifted.lifted_signal[k].cwiseProduct(V.transpose())).sum().real();
            const double tm = (lifted.lifted_misalign[k].cwiseProduct(V.transpose())).sum().real();
            local_err = std::max(local_err, std::fabs(ts - std::norm(prod)));
            local_err = std::max(local_err, std::fabs(tm + 1.0 - std::norm(prod - 1.0)));
          }
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      max_err = std::max(max_err, local_err);
    });
  }
  const double secs = seconds_since(t0);
  if (max_err > 1e-10 || secs >= 10.0) pass = false;
  std::ostringstream os;
  os << "1000 pairs per element count, max abs error " << max_err;
  report(1, "lifted trace identities", pass, os.str(), secs);
}

// ---------------------------------------------------------------------------
// 2. Full power transmission without a rate floor.
void criterion_full_power() {
  const auto t0 = Clock::now();
  NetworkConfig cfg = base_config(1, 2, 8, 2, 0.5, 0.0, 1e9);
  std::atomic<int> bad{0};
  double worst = 0.0;
  std::mutex mu;
  parallel_for(100, [&](int s) {
    Rng rng(Rng::mix(41, s));
    const NetworkConfig placed = place_users(cfg, rng);
    const ChannelRealization rel = sample_channels(placed, Rng::mix(42, s));
    ReflectionState refl;
    refl.mode = ReflectionState::Mode::Discrete;
    refl.theta.resize(8);
    for (int m = 0; m < 8; ++m) refl.theta[m] = (rng.uniform_int(4) + 0.5) * placed.phase_step();
    RVec gains = channel_gains(combined_channel(rel, refl));
    std::sort(gains.begin() + 1, gains.end());
    RVec p_airfl = RVec::Constant(1, rng.uniform(0.0, std::sqrt(placed.power_budget(0))));
    const NomaPowerResult r = solve_noma_power(gains, p_airfl, placed);
    double local = 0.0;
    if (r.status != PowerStatus::Converged) {
      ++bad;
      return;
    }
    for (int j = 0; j < 2; ++j) {
      const double want = std::sqrt(placed.power_budget(1 + j));
      local = std::max(local, std::fabs(r.p_noma[j] - want) / want);
    }
    if (local > 1e-10) ++bad;
    std::lock_guard<std::mutex> lock(mu);
    worst = std::max(worst, local);
  });
  std::ostringstream os;
  os << "100 channels, worst relative deviation " << worst;
  report(2, "full power without rate floor", bad == 0, os.str(), seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 3. Closed-form receive scalar under a relaxed distortion cap.
void criterion_closed_form_scalar() {
  const auto t0 = Clock::now();
  NetworkConfig cfg = base_config(3, 0, 4, 2, 1.0, 0.0, std::numeric_limits<double>::infinity());
  int bad = 0;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Rng rng(Rng::mix(77, s));
    const int K = 3;
    CVec h(K);
    RVec p(K);
    for (int k = 0; k < K; ++k) {
      h[k] = rng.cgauss();
      p[k] = rng.uniform(0.2, 1.5);
    }
    cplx sum = 0.0;
    for (int k = 0; k < K; ++k) sum += h[k] * p[k];
    if (std::abs(sum) < 1e-6) continue;
    const cplx want = static_cast<double>(K) / sum;
    const ScalarSolveResult r = sca_scalar(h, p, cfg, std::nullopt);
    const double err = std::abs(r.a - want) / std::abs(want);
    worst = std::max(worst, err);
    if (err > 1e-8) ++bad;
  }
  std::ostringstream os;
  os << "100 instances, worst relative deviation " << worst;
  report(3, "closed-form receive scalar", bad == 0, os.str(), seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 4. Solver-versus-oracle equivalences.
void criterion_oracles() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::ostringstream os;

  {  // (a) communication power program against vertex enumeration
    Rng rng(11);
    NetworkConfig cfg = base_config(1, 2, 4, 2, 0.5, 0.7e6, 1e9);
    cfg.noise_power_w = 0.1;
    cfg.power_budget_w.assign(3, 1.0);
    int checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      RVec g(3);
      for (int i = 0; i < 3; ++i) g[i] = rng.uniform(0.3, 2.5);
      std::sort(g.begin(), g.end());
      RVec p_airfl = RVec::Constant(1, rng.uniform(0.0, 0.5));
      const NomaPowerResult r = solve_noma_power(g, p_airfl, cfg);
      if (r.status != PowerStatus::Converged) continue;
      const double zeta = cfg.qos_sinr_threshold();
      const double base = p_airfl[0] * p_airfl[0] * g[0] + cfg.noise_power_w;
      convex::LinearProgram lp;
      lp.c = g.tail(2);
      lp.A = Eigen::MatrixXd::Zero(2, 2);
      lp.b = RVec::Zero(2);
      lp.A(0, 0) = -g[1];
      lp.b[0] = -zeta * base;
      lp.A(1, 0) = zeta * g[1];
      lp.A(1, 1) = -g[2];
      lp.b[1] = -zeta * base;
      lp.lower = RVec::Zero(2);
      lp.upper = RVec::Ones(2);
      const convex::BackendSolution v = convex::brute_force_oracle(convex::ConvexProblem(lp), 1e-9);
      if (v.status != convex::SolveStatus::Optimal) continue;
      const double mine = g[1] * r.p_noma[0] * r.p_noma[0] + g[2] * r.p_noma[1] * r.p_noma[1];
      worst = std::max(worst, std::fabs(mine - v.objective) / std::max(1e-12, v.objective));
      ++checked;
    }
    if (checked < 10 || worst > 1e-6) pass = false;
    os << "power LP err " << worst;
  }

  {  // (b) aggregation power iteration against a 2-D grid
    NetworkConfig cfg = base_config(2, 1, 4, 2, 0.6, 0.0, 0.25);
    cfg.noise_power_w = 0.1;
    cfg.power_budget_w.assign(3, 1.0);
    double worst = 0.0;
    for (std::uint64_t seed : {17ULL, 18ULL, 19ULL}) {
      Rng rng(seed);
      RVec g(3);
      for (int i = 0; i < 3; ++i) g[i] = rng.uniform(0.2, 2.0);
      std::sort(g.begin(), g.end());
      RVec p_noma = RVec::Constant(1, 1.0);
      const cplx a(1.2, 0.0);
      const AirflPowerResult r = solve_airfl_power(g, a, p_noma, RVec(), cfg);
      if (r.status == PowerStatus::Infeasible) continue;
      const double lam = cfg.weight_lambda, B = cfg.bandwidth_hz, s2 = cfg.noise_power_w;
      const double i_fixed = g[2];
      auto objective = [&](double r1, double r2) {
        const double inter = r1 * g[0] + r2 * g[1] + s2;
        const double comm = B * std::log2(1.0 + i_fixed / inter);
        const double c1 = std::abs(a) * std::sqrt(g[0]), c2 = std::abs(a) * std::sqrt(g[1]);
        const double e1 = c1 * std::sqrt(r1) - 1.0, e2 = c2 * std::sqrt(r2) - 1.0;
        const double err = e1 * e1 + e2 * e2 + std::norm(a) * s2;
        if (err > cfg.mse_tolerance * 4.0) return -1e300;
        const double sig = c1 * c1 * r1 + c2 * c2 * r2 + std::norm(a) * s2;
        return (1.0 - lam) * comm + lam * std::max(0.0, B * std::log2(sig / err));
      };
      double best = -1e300;
      for (int i = 0; i <= 1000; ++i)
        for (int j = 0; j <= 1000; ++j) best = std::max(best, objective(i / 1000.0, j / 1000.0));
      const double mine = objective(r.p_airfl[0] * r.p_airfl[0], r.p_airfl[1] * r.p_airfl[1]);
      worst = std::max(worst, (best - mine) / std::fabs(best));
    }
    if (worst > 1e-3) pass = false;
    os << ", aggregation DC gap " << worst;
  }

  {  // (c) receive scalar against a constrained grid
    const int K = 2;
    CVec h(K);
    h << cplx(1.0, 0.2), cplx(0.4, -0.3);
    RVec p = RVec::Ones(K);
    NetworkConfig cfg = base_config(2, 0, 4, 2, 1.0, 0.0, 0.15);
    cfg.noise_power_w = 0.05;
    const ScalarSolveResult r = sca_scalar(h, p, cfg, std::nullopt);
    double gap = 1e300;
    if (r.status == ScalarSolveResult::Status::Converged) {
      CVec c = h;
      auto align = [&](cplx ab) { return std::norm(ab - c[0]) + std::norm(ab - c[1]); };
      auto mse_of = [&](cplx ab) {
        return (align(ab) + cfg.noise_power_w) / (K * K * std::norm(ab));
      };
      double best = 1e300;
      for (double x = -3; x <= 3; x += 2e-3)
        for (double y = -3; y <= 3; y += 2e-3) {
          const cplx ab(x, y);
          if (std::norm(ab) < 1e-6 || mse_of(ab) > cfg.mse_tolerance) continue;
          best = std::min(best, align(ab));
        }
      gap = align(1.0 / r.a) - best;
    }
    if (!(gap <= 1e-4)) pass = false;
    os << ", scalar grid gap " << gap;
  }

  {  // (d) single-element reflection against a phase scan
    double worst = 0.0;
    for (std::uint64_t seed : {4ULL, 5ULL, 6ULL}) {
      NetworkConfig cfg = unit_scale_config(1, 1, 1);
      cfg.phase_bits = 3;
      const ChannelRealization rel0 = sample_channels(cfg, seed);
      ReflectionState start{RVec::Constant(1, cfg.phase_step() / 2), ReflectionState::Mode::Discrete};
      RVec gains = channel_gains(combined_channel(rel0, start));
      const ChannelRealization rel = reorder_users(rel0, decode_order(gains, 1, 1));
      TransceiverState st;
      st.p = RVec::Ones(2);
      const CVec ch = combined_channel(rel, start);
      st.a = cplx(1.0 / std::abs(ch[0]), 0.0);
      const FrozenTransceiver txrx = FrozenTransceiver::freeze(st, ch, 1);
      ReflectionOptions opt;
      opt.exhaustive_bit_threshold = 0;
      Rng rng(seed);
      const ReflectionStepResult step =
          reflection_step(rel, txrx, cfg, start, ReflectionState::Mode::Continuous, rng, opt);
      double best = -1e300;
      for (int i = 0; i < 20000; ++i) {
        const RVec theta = RVec::Constant(1, i * kTwoPi / 20000.0);
        if (!check_candidate(rel, txrx, cfg, theta).ok()) continue;
        best = std::max(best, reflection_score(rel, txrx, cfg, theta));
      }
      if (!step.reflection) {
        worst = 1e300;
        continue;
      }
      worst = std::max(worst, (best - step.score) / std::fabs(best));
    }
    if (!(worst <= 1e-4)) pass = false;
    os << ", single-element gap " << worst;
  }

  int dominated = 0, total = 0;
  {  // (e) exhaustive dominance over relax-then-quantize at M=5, b=1
    std::mutex mu;
    parallel_for(100, [&](int s) {
      // Resample the rare draws where no single-bit pattern satisfies the
      // decode ordering (exhaustive search has nothing to return there).
      for (int attempt = 0; attempt < 20; ++attempt) {
        NetworkConfig cfg = unit_scale_config(1, 1, 5);
        cfg.phase_bits = 1;
        const std::uint64_t seed = 500 + static_cast<std::uint64_t>(s) + 10000ULL * attempt;
        const ChannelRealization rel0 = sample_channels(cfg, seed);
        ReflectionState start{RVec::Constant(5, cfg.phase_step() / 2), ReflectionState::Mode::Discrete};
        RVec gains = channel_gains(combined_channel(rel0, start));
        const ChannelRealization rel = reorder_users(rel0, decode_order(gains, 1, 1));
        TransceiverState st;
        st.p = RVec::Ones(2);
        const CVec ch = combined_channel(rel, start);
        st.a = cplx(1.0 / std::abs(ch[0]), 0.0);
        const FrozenTransceiver txrx = FrozenTransceiver::freeze(st, ch, 1);
        const ExhaustiveResult ex = exhaustive_search(rel, txrx, cfg);
        if (!ex.best) continue;
        ReflectionOptions opt;
        opt.exhaustive_bit_threshold = 0;
        Rng rng(s);
        const ReflectionStepResult step =
            reflection_step(rel, txrx, cfg, start, ReflectionState::Mode::Discrete, rng, opt);
        std::lock_guard<std::mutex> lock(mu);
        ++total;
        if (!step.reflection || ex.best_score >= step.score - 1e-9 * std::fabs(step.score)) ++dominated;
        return;
      }
    });
    if (dominated != total || total < 100) pass = false;
    os << ", exhaustive dominance " << dominated << "/" << total;
  }

  report(4, "subproblem oracle equivalence", pass, os.str(), seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 5. Alternating optimization: monotone and quick to converge.
void criterion_ao_convergence() {
  const auto t0 = Clock::now();
  const NetworkConfig cfg = base_config(2, 1, 8, 2, 0.5, 0.2e6, 0.6);
  std::atomic<int> bad{0};
  std::atomic<int> max_iters{0};
  parallel_for(50, [&](int s) {
    Rng rng(Rng::mix(3000, s));
    const NetworkConfig placed = place_users(cfg, rng);
    const ChannelRealization rel = sample_channels(placed, Rng::mix(3001, s));
    const SolveReport r = alternating_optimize(rel, placed, SchemeSpec{SchemeSpec::Kind::DiscreteRis},
                                               Rng::mix(3002, s));
    bool ok = r.termination != SolveReport::Termination::Infeasible && r.feasible_final;
    ok = ok && r.iterations <= 20;
    for (std::size_t i = 1; i < r.objective_trace.size() && ok; ++i)
      ok = r.objective_trace[i] >=
           r.objective_trace[i - 1] - 1e-9 * std::max(1.0, std::fabs(r.objective_trace[i - 1]));
    if (!ok) ++bad;
    int prev = max_iters.load();
    while (r.iterations > prev && !max_iters.compare_exchange_weak(prev, r.iterations)) {
    }
  });
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "50 seeds, worst iteration count " << max_iters.load() << ", violations " << bad.load();
  report(5, "alternating optimization convergence", bad == 0 && secs < 300.0, os.str(), secs);
}

// ---------------------------------------------------------------------------
// 6. Placement sweep: the mean rate dips at the midpoint.
void criterion_placement() {
  const auto t0 = Clock::now();
  NetworkConfig cfg = base_config(4, 2, 8, 2, 0.5, 0.0, std::numeric_limits<double>::infinity());
  SweepSpec spec;
  spec.param = SweepParam::RisY;
  spec.grid = {10, 20, 30, 40, 50};
  spec.trials = 200;
  spec.schemes = {SchemeSpec{SchemeSpec::Kind::DiscreteRis}};
  spec.seed = 61;
  spec.threads = 2;
  const ResultsTable table = run_sweep(spec, cfg);
  double min_rate = 1e300, min_at = -1;
  std::ostringstream os;
  os << "means";
  for (const SummaryRow& r : table.summary) {
    os << " " << r.sweep_value << ":" << std::lround(r.mean_rate);
    if (r.mean_rate < min_rate) {
      min_rate = r.mean_rate;
      min_at = r.sweep_value;
    }
  }
  const double secs = seconds_since(t0);
  report(6, "placement dip at the midpoint", min_at == 30.0 && secs < 900.0, os.str(), secs);
}

// ---------------------------------------------------------------------------
// 7. More elements help; finer phases help.
void criterion_elements() {
  const auto t0 = Clock::now();
  std::map<int, std::map<double, double>> means;  // bits -> M -> mean
  for (int bits : {1, 2}) {
    NetworkConfig cfg = base_config(2, 2, 5, bits, 0.5, 0.0, std::numeric_limits<double>::infinity());
    SweepSpec spec;
    spec.param = SweepParam::NumElements;
    spec.grid = {5, 10, 15, 20};
    spec.trials = 40;
    spec.schemes = {SchemeSpec{SchemeSpec::Kind::DiscreteRis}};
    spec.seed = 71;
    spec.threads = 2;
    const ResultsTable table = run_sweep(spec, cfg);
    for (const SummaryRow& r : table.summary) means[bits][r.sweep_value] = r.mean_rate;
  }
  bool increasing = true, finer_better = true;
  for (int bits : {1, 2}) {
    double prev = -1;
    for (double m : {5.0, 10.0, 15.0, 20.0}) {
      if (means[bits][m] <= prev) increasing = false;
      prev = means[bits][m];
    }
  }
  for (double m : {5.0, 10.0, 15.0, 20.0})
    if (means[2][m] <= means[1][m]) finer_better = false;
  std::ostringstream os;
  os << "b=1:";
  for (double m : {5.0, 10.0, 15.0, 20.0}) os << " " << std::lround(means[1][m]);
  os << "; b=2:";
  for (double m : {5.0, 10.0, 15.0, 20.0}) os << " " << std::lround(means[2][m]);
  report(7, "element count and resolution trends", increasing && finer_better, os.str(),
         seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 8. Optimized reflection versus frozen random reflection.
void criterion_gain_over_random() {
  const auto t0 = Clock::now();
  NetworkConfig cfg =
      base_config(4, 2, 20, 1, 0.5, 0.0, std::numeric_limits<double>::infinity(), 25.0);
  SweepSpec spec;
  spec.param = SweepParam::NumElements;
  spec.grid = {20};
  spec.trials = 200;
  spec.schemes = {SchemeSpec{SchemeSpec::Kind::DiscreteRis}, SchemeSpec{SchemeSpec::Kind::RandomRis}};
  spec.seed = 81;
  spec.threads = 2;
  const ResultsTable table = run_sweep(spec, cfg);
  double opt = 0, rnd = 0;
  for (const SummaryRow& r : table.summary) {
    if (r.scheme == "discrete-ris") opt = r.mean_rate;
    if (r.scheme == "random-ris") rnd = r.mean_rate;
  }
  const double gain_pct = (opt / rnd - 1.0) * 100.0;
  std::ostringstream os;
  os << "optimized " << std::lround(opt) << " vs random " << std::lround(rnd) << " bit/s, measured gain "
     << gain_pct << "%";
  report(8, "gain over the random reflection", gain_pct >= 10.0, os.str(), seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 9. Paired-seed relaxation dominance.
void criterion_dominance() {
  const auto t0 = Clock::now();
  const NetworkConfig cfg = base_config(2, 1, 8, 2, 0.5, 0.2e6, 0.6);
  std::atomic<int> ok_count{0}, usable{0};
  parallel_for(100, [&](int s) {
    Rng rng(Rng::mix(9100, s));
    const NetworkConfig placed = place_users(cfg, rng);
    const ChannelRealization rel = sample_channels(placed, Rng::mix(9101, s));
    const std::vector<SchemeSpec> schemes = {
        SchemeSpec{SchemeSpec::Kind::DiscreteRis}, SchemeSpec{SchemeSpec::Kind::ContinuousRis},
        SchemeSpec{SchemeSpec::Kind::RelaxedQos}, SchemeSpec{SchemeSpec::Kind::RelaxedMse}};
    const std::vector<SolveReport> reports = run_scheme_suite(rel, placed, schemes, Rng::mix(9102, s));
    double base = -1, cont = -1, rqos = -1, rmse = -1;
    for (const SolveReport& r : reports) {
      if (r.termination == SolveReport::Termination::Infeasible) return;
      if (r.scheme == "discrete-ris") base = r.objective();
      if (r.scheme == "continuous-ris") cont = r.objective();
      if (r.scheme == "relaxed-qos") rqos = r.objective();
      if (r.scheme == "relaxed-mse") rmse = r.objective();
    }
    ++usable;
    const double tol = 1e-9 * std::max(1.0, base);
    if (cont >= base - tol && rqos >= base - tol && rmse >= base - tol) ++ok_count;
  });
  std::ostringstream os;
  os << ok_count.load() << "/" << usable.load() << " seeds dominated";
  report(9, "relaxation dominance across schemes", usable > 0 && ok_count == usable, os.str(),
         seconds_since(t0));
}

// ---------------------------------------------------------------------------
// 10. Single-type networks run through the same pipeline.
void criterion_degenerate() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::ostringstream os;
  {
    NetworkConfig cfg = base_config(0, 2, 8, 2, 0.0, 0.2e6, 1e9);
    Rng rng(5);
    const NetworkConfig placed = place_users(cfg, rng);
    const ChannelRealization rel = sample_channels(placed, 55);
    const SolveReport r =
        alternating_optimize(rel, placed, SchemeSpec{SchemeSpec::Kind::DiscreteRis}, 55);
    const bool ok = r.termination != SolveReport::Termination::Infeasible && r.step2_skipped &&
                    r.feasible_final &&
                    std::fabs(r.final_breakdown.rate_hybrid - r.final_breakdown.rate_noma_sum) <=
                        1e-9 * std::max(1.0, r.final_breakdown.rate_noma_sum);
    pass = pass && ok;
    os << "communication-only " << (ok ? "ok" : "failed");
  }
  {
    NetworkConfig cfg = base_config(2, 0, 8, 2, 1.0, 0.0, 0.6);
    Rng rng(6);
    const NetworkConfig placed = place_users(cfg, rng);
    const ChannelRealization rel = sample_channels(placed, 66);
    const SolveReport r =
        alternating_optimize(rel, placed, SchemeSpec{SchemeSpec::Kind::DiscreteRis}, 66);
    const bool ok = r.termination != SolveReport::Termination::Infeasible && !r.step2_skipped &&
                    r.feasible_final && r.final_breakdown.rate_noma_sum == 0.0 &&
                    std::fabs(r.final_breakdown.rate_hybrid - r.final_breakdown.rate_airfl) <=
                        1e-9 * std::max(1.0, r.final_breakdown.rate_airfl);
    pass = pass && ok;
    os << ", aggregation-only " << (ok ? "ok" : "failed");
  }
  report(10, "single-type networks", pass, os.str(), seconds_since(t0));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_lemmas();
  criterion_full_power();
  criterion_closed_form_scalar();
  criterion_oracles();
  criterion_ao_convergence();
  criterion_placement();
  criterion_elements();
  criterion_gain_over_random();
  criterion_dominance();
  criterion_degenerate();
  std::printf("acceptance: %d of 10 criteria passed in %.1f s\n", 10 - g_failures,
              seconds_since(t0));
  return g_failures;
}
