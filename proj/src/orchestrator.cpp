#include "hybridnet/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace hybridnet {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

NetworkConfig permute_budgets(const NetworkConfig& cfg, const std::vector<int>& perm) {
  NetworkConfig out = cfg;
  for (std::size_t i = 0; i < perm.size(); ++i)
    out.power_budget_w[i] = cfg.power_budget(perm[i]);
  return out;
}

ReflectionState random_discrete_reflection(int elements, int bits, Rng& rng) {
  ReflectionState refl;
  refl.mode = ReflectionState::Mode::Discrete;
  refl.theta.resize(elements);
  const int levels = 1 << bits;
  const double step = kTwoPi / levels;
  for (int m = 0; m < elements; ++m) refl.theta[m] = (rng.uniform_int(levels) + 0.5) * step;
  return refl;
}

// Least distortion achievable with aggregation power budgets scaled by t,
// minimizing over the receive scalar magnitude; also returns the witness
// powers. Decreasing noise leverage makes this nonincreasing in t.
double min_mse_on_ray(const RVec& gains, const NetworkConfig& cfg, double t, RVec* rho_witness = nullptr) {
  const int K = cfg.num_airfl;
  auto err_at = [&](double a_abs) {
    double total = a_abs * a_abs * cfg.noise_power_w;
    for (int k = 0; k < K; ++k) {
      const double c = a_abs * std::sqrt(gains[k] * t * cfg.power_budget(k));
      const double miss = std::max(0.0, 1.0 - c);
      total += miss * miss;
    }
    return total / (static_cast<double>(K) * K);
  };
  double hi = 0.0;
  for (int k = 0; k < K; ++k)
    hi = std::max(hi, 2.0 / std::sqrt(std::max(gains[k] * t * cfg.power_budget(k), 1e-300)));
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {  // golden section on a convex 1-D profile
    const double m1 = lo + 0.382 * (hi - lo);
    const double m2 = lo + 0.618 * (hi - lo);
    if (err_at(m1) < err_at(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double a_opt = 0.5 * (lo + hi);
  if (rho_witness) {
    rho_witness->resize(K);
    for (int k = 0; k < K; ++k) {
      const double cap = t * cfg.power_budget(k);
      const double ideal = 1.0 / std::max(a_opt * a_opt * gains[k], 1e-300);
      (*rho_witness)[k] = std::min(ideal, cap);
    }
  }
  return err_at(a_opt);
}

// Joint feasibility screen for a reflection: scan the scaled-power ray for a
// point where the distortion cap and the rate-floor cascade hold together.
// The distortion shrinks and the cascade slack grows toward opposite ends,
// so a nonempty [t_low, t_high] window is a feasibility witness.
struct FeasibilityWindow {
  bool ok = true;
  bool mse_side = true;   // distortion cap reachable at full scale
  bool qos_side = true;   // cascade feasible at the low end
  double t_low = 0.0, t_high = 1.0;
  RVec rho_witness;       // aggregation powers at the chosen point
};

FeasibilityWindow screen_reflection(const RVec& gains, const NetworkConfig& cfg) {
  FeasibilityWindow out;
  const int K = cfg.num_airfl;
  if (cfg.mse_active()) {
    const double cap = cfg.mse_tolerance * (1.0 + 1e-9);
    if (min_mse_on_ray(gains, cfg, 1.0) > cap) {
      out.ok = false;
      out.mse_side = false;
      return out;
    }
    double lo = 0.0, hi = 1.0;
    if (min_mse_on_ray(gains, cfg, 0.0) <= cap) {
      hi = 0.0;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (min_mse_on_ray(gains, cfg, mid) <= cap)
          hi = mid;
        else
          lo = mid;
      }
    }
    out.t_low = hi;
  }
  if (cfg.qos_active() && K > 0) {
    auto cascade_ok = [&](double t) {
      RVec p_airfl(K);
      for (int k = 0; k < K; ++k) p_airfl[k] = std::sqrt(t * cfg.power_budget(k));
      return qos_min_powers(gains, p_airfl, cfg).feasible;
    };
    if (!cascade_ok(out.t_low)) {
      out.ok = false;
      out.qos_side = false;
      return out;
    }
    if (cascade_ok(1.0)) {
      out.t_high = 1.0;
    } else {
      double lo = out.t_low, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cascade_ok(mid))
          lo = mid;
        else
          hi = mid;
      }
      out.t_high = lo;
    }
  } else if (cfg.qos_active()) {
    out.qos_side = qos_min_powers(gains, RVec(), cfg).feasible;
    out.ok = out.qos_side;
  }
  if (K > 0) {
    const double t_pick = out.t_low + 0.25 * (out.t_high - out.t_low);
    min_mse_on_ray(gains, cfg, std::max(t_pick, 1e-12), &out.rho_witness);
    if (!cfg.mse_active())
      for (int k = 0; k < K; ++k) out.rho_witness[k] = std::min(out.rho_witness[k], t_pick * cfg.power_budget(k));
  }
  return out;
}

}  // namespace

std::string SchemeSpec::label() const {
  switch (kind) {
    case Kind::DiscreteRis: return "discrete-ris";
    case Kind::ContinuousRis: return "continuous-ris";
    case Kind::RandomRis: return "random-ris";
    case Kind::RelaxedQos: return "relaxed-qos";
    case Kind::RelaxedMse: return "relaxed-mse";
  }
  return "unknown";
}

SchemeSpec SchemeSpec::from_label(const std::string& name) {
  for (const SchemeSpec& s : all())
    if (s.label() == name) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::vector<SchemeSpec> SchemeSpec::all() {
  return {SchemeSpec{Kind::DiscreteRis}, SchemeSpec{Kind::ContinuousRis}, SchemeSpec{Kind::RandomRis},
          SchemeSpec{Kind::RelaxedQos}, SchemeSpec{Kind::RelaxedMse}};
}

NetworkConfig SchemeSpec::apply(const NetworkConfig& cfg) const {
  NetworkConfig out = cfg;
  if (kind == Kind::RelaxedQos) out.min_rate_bps = 0.0;
  if (kind == Kind::RelaxedMse) out.mse_tolerance = std::numeric_limits<double>::infinity();
  return out;
}

std::string SolveReport::record_rows() const {
  std::ostringstream os;
  os.precision(17);
  os << "# scheme=" << scheme << " iterations=" << iterations << " termination="
     << (termination == Termination::Tolerance ? "tolerance"
                                               : termination == Termination::Cap ? "cap" : "infeasible")
     << " feasible=" << (feasible_final ? 1 : 0) << " step2_skipped=" << (step2_skipped ? 1 : 0) << "\n";
  os << "iteration,objective_bps\n";
  for (std::size_t i = 0; i < objective_trace.size(); ++i) os << i << "," << objective_trace[i] << "\n";
  return os.str();
}

SolveReport alternating_optimize(const ChannelRealization& rel_in, const NetworkConfig& cfg_in,
                                 const SchemeSpec& scheme, std::uint64_t seed,
                                 std::optional<Initialization> init, const OrchestratorOptions& opt) {
  SolveReport report;
  report.scheme = scheme.label();
  NetworkConfig cfg = scheme.apply(cfg_in);
  cfg.validate();
  const int K = cfg.num_airfl, N = cfg.num_noma;
  Rng rng(Rng::mix(seed, 0x5EED));

  // Draw (or adopt) an initial reflection and fix the decode order at it.
  ReflectionState refl;
  std::vector<int> perm;
  ChannelRealization rel = rel_in;
  bool ordered = false;
  for (int attempt = 0; attempt < opt.init_retries && !ordered; ++attempt) {
    refl = (init && attempt == 0) ? init->reflection
                                  : random_discrete_reflection(cfg.num_elements, cfg.phase_bits, rng);
    const RVec gains_raw = channel_gains(combined_channel(rel_in, refl));
    perm = decode_order(gains_raw, K, N);
    RVec gains_sorted(K + N);
    for (int i = 0; i < K + N; ++i) gains_sorted[i] = gains_raw[perm[static_cast<std::size_t>(i)]];
    ordered = ordering_satisfied(gains_sorted, K, N);
  }
  if (!ordered) {
    report.termination = SolveReport::Termination::Infeasible;
    report.message = "no decode-order-feasible initial reflection after retries";
    return report;
  }
  rel = reorder_users(rel_in, perm);
  cfg = permute_budgets(cfg, perm);
  report.user_order = perm;

  auto channels_at = [&](const ReflectionState& r) { return combined_channel(rel, r); };

  // A supplied initialization that is already feasible is adopted verbatim;
  // warm starts from another solve's final point must keep their value.
  TransceiverState state;
  bool init_adopted = false;
  if (init && init->transceiver.p.size() == K + N) {
    TransceiverState cand;
    cand.p.resize(K + N);
    for (int i = 0; i < K + N; ++i) cand.p[i] = init->transceiver.p[perm[static_cast<std::size_t>(i)]];
    cand.a = init->transceiver.a;
    bool ok = K == 0 || std::abs(cand.a) > 0;
    for (int i = 0; i < K + N && ok; ++i) ok = cand.p[i] * cand.p[i] <= cfg.power_budget(i) * (1.0 + 1e-9);
    if (ok) {
      const RateBreakdown bd = hybrid_rate(cand, channels_at(refl), cfg);
      if (cfg.qos_active())
        for (Eigen::Index j = 0; j < bd.rate_noma_user.size() && ok; ++j)
          ok = bd.rate_noma_user[j] >= cfg.min_rate_bps * (1.0 - 1e-9);
      if (cfg.mse_active() && ok) ok = bd.mse <= cfg.mse_tolerance * (1.0 + 1e-9);
      if (ok) {
        state = cand;
        init_adopted = true;
      }
    }
  }

  // Feasibility restoration: steer the reflection toward a point where the
  // rate floors and the distortion cap can hold together, before the rate
  // optimization starts.
  FeasibilityWindow window;
  if (!init_adopted) window = screen_reflection(channel_gains(channels_at(refl)), cfg);
  if (!init_adopted) {
    int round = 0;
    while (!window.ok && !scheme.freeze_reflection() && round < opt.restoration_rounds) {
      report.restoration_used = true;
      TransceiverState prov;
      prov.p.resize(K + N);
      for (int k = 0; k < K; ++k)
        prov.p[k] = window.rho_witness.size() == K ? std::sqrt(window.rho_witness[k])
                                                   : std::sqrt(cfg.power_budget(k));
      for (int j = 0; j < N; ++j) prov.p[K + j] = std::sqrt(cfg.power_budget(K + j));
      CVec ch = channels_at(refl);
      prov.a = 1.0;
      if (K > 0) {
        double denom = 0.0;
        for (int k = 0; k < K; ++k) denom += std::abs(ch[k]) * prov.p[k];
        prov.a = denom > 0 ? K / denom : 1.0;
      }
      FrozenTransceiver txrx = FrozenTransceiver::freeze(prov, ch, K);
      ReflectionOptions ropt = opt.reflection;
      ropt.feasibility_objective = true;
      ReflectionStepResult step =
          reflection_step(rel, txrx, cfg, refl, scheme.reflection_mode(), rng, ropt);
      if (step.reflection) refl = *step.reflection;
      window = screen_reflection(channel_gains(channels_at(refl)), cfg);
      ++round;
    }
    if (!window.ok) {
      report.termination = SolveReport::Termination::Infeasible;
      report.message = !window.mse_side ? "aggregation error cap unattainable for this scenario"
                                        : "rate floor unattainable for this scenario";
      report.reflection = refl;
      return report;
    }
  }

  // Transceiver initialization: aggregation powers from the feasibility
  // witness, communication powers from a first allocation pass, scalar from
  // the constrained fit. The loop then starts at a fully feasible point.
  if (!init_adopted) {
    state.p.resize(K + N);
    for (int i = 0; i < K + N; ++i) state.p[i] = std::sqrt(cfg.power_budget(i));
    state.a = 1.0;

    const CVec ch = channels_at(refl);
    const RVec gains = channel_gains(ch);
    CVec eff(K);
    for (int k = 0; k < K; ++k) eff[k] = std::abs(ch[k]);

    if (K > 0 && cfg.mse_active() && window.rho_witness.size() == K)
      for (int k = 0; k < K; ++k) state.p[k] = std::sqrt(window.rho_witness[k]);
    if (cfg.qos_active() && N > 0) {
      const NomaPowerResult lp0 = solve_noma_power(gains, state.p.head(K), cfg);
      if (lp0.status != PowerStatus::Infeasible) {
        state.p.tail(N) = lp0.p_noma;
      } else {
        const QosCascade cascade = qos_min_powers(gains, state.p.head(K), cfg);
        if (cascade.feasible)
          for (int j = 0; j < N; ++j) state.p[K + j] = std::sqrt(cascade.rho_min[j]);
      }
    }
    if (K > 0) {
      double denom = 0.0;
      for (int k = 0; k < K; ++k) denom += std::abs(ch[k]) * state.p[k];
      state.a = denom > 0 ? cplx(K / denom, 0.0) : cplx(1.0, 0.0);
      if (cfg.mse_active()) {
        const ScalarSolveResult fix = sca_scalar(eff, state.p.head(K), cfg, std::nullopt, opt.scalar);
        if (fix.status != ScalarSolveResult::Status::Infeasible) state.a = fix.a;
      }
    }
  }

  auto evaluate = [&](const TransceiverState& st, const ReflectionState& r) {
    return hybrid_rate(st, channels_at(r), cfg);
  };

  RateBreakdown current = evaluate(state, refl);
  double U = current.rate_hybrid;
  report.objective_trace.push_back(U);

  // Crude per-instance rate ceiling from coherent channel gains.
  {
    double max_gain = 0.0, power_sum = 0.0;
    for (int i = 0; i < K + N; ++i) {
      double coherent = 0.0;
      for (int m = 0; m < cfg.num_elements; ++m) coherent += std::abs(rel.phi_scaled[static_cast<std::size_t>(i)][m]);
      max_gain = std::max(max_gain, coherent * coherent);
      power_sum += cfg.power_budget(i);
    }
    report.analytic_upper_bound =
        cfg.bandwidth_hz * (N + 1) * std::log2(1.0 + power_sum * max_gain / cfg.noise_power_w);
  }

  const double slack = 1e-9;
  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    // Step 1: transmit power.
    {
      const auto t0 = Clock::now();
      const RVec gains = channel_gains(channels_at(refl));
      const PowerAllocationResult pr = allocate_power(gains, state.a, state.p, cfg, opt.power);
      report.wall_ms_power += ms_since(t0);
      report.power_traces.push_back(pr.objective_trace);
      if (pr.status != PowerStatus::Infeasible) {
        TransceiverState cand = state;
        cand.p = pr.p;
        const RateBreakdown bd = evaluate(cand, refl);
        if (bd.rate_hybrid >= U - slack * std::max(1.0, std::fabs(U))) {
          state = cand;
          current = bd;
          U = bd.rate_hybrid;
        }
      }
    }

    // Step 2: receive scalar.
    if (K > 0) {
      const auto t0 = Clock::now();
      const CVec ch = channels_at(refl);
      CVec eff(K);
      for (int k = 0; k < K; ++k) eff[k] = std::abs(ch[k]);
      cplx a_cand = state.a;
      std::vector<double> trace;
      if (!cfg.mse_active()) {
        a_cand = closed_form_scalar(eff, state.p.head(K));
      } else {
        const ScalarSolveResult sr = sca_scalar(eff, state.p.head(K), cfg, std::nullopt, opt.scalar);
        trace = sr.rate_trace;
        if (sr.status != ScalarSolveResult::Status::Infeasible) a_cand = sr.a;
      }
      report.wall_ms_scalar += ms_since(t0);
      report.scalar_traces.push_back(trace);
      TransceiverState cand = state;
      cand.a = a_cand;
      const RateBreakdown bd = evaluate(cand, refl);
      if (bd.rate_hybrid >= U - slack * std::max(1.0, std::fabs(U))) {
        state = cand;
        current = bd;
        U = bd.rate_hybrid;
      }
    } else {
      report.step2_skipped = true;
    }

    // Step 3: reflection.
    if (!scheme.freeze_reflection()) {
      const auto t0 = Clock::now();
      const CVec ch = channels_at(refl);
      const FrozenTransceiver txrx = FrozenTransceiver::freeze(state, ch, K);
      const ReflectionStepResult step =
          reflection_step(rel, txrx, cfg, refl, scheme.reflection_mode(), rng, opt.reflection);
      report.wall_ms_reflection += ms_since(t0);
      report.reflection_traces.push_back(step.dc_trace);
      if (step.reflection) {
        const RateBreakdown bd = evaluate(state, *step.reflection);
        if (bd.rate_hybrid >= U - slack * std::max(1.0, std::fabs(U))) {
          refl = *step.reflection;
          current = bd;
          U = bd.rate_hybrid;
        }
      }
    }

    report.objective_trace.push_back(U);
    report.iterations = iter;
    const double prev = report.objective_trace[static_cast<std::size_t>(iter) - 1];
    if (std::fabs(U - prev) <= opt.tolerance * std::max(1.0, std::fabs(prev))) {
      report.termination = SolveReport::Termination::Tolerance;
      break;
    }
    if (iter == opt.max_iters) report.termination = SolveReport::Termination::Cap;
  }

  report.transceiver = state;
  report.reflection = refl;
  report.final_breakdown = current;

  // Feasibility of the returned point under the original constraints.
  {
    const RVec gains = channel_gains(channels_at(refl));
    bool ok = ordering_satisfied(gains, K, N);
    for (int i = 0; i < K + N && ok; ++i)
      ok = state.p[i] * state.p[i] <= cfg.power_budget(i) * (1.0 + 1e-9);
    if (cfg.qos_active())
      for (Eigen::Index j = 0; j < current.rate_noma_user.size() && ok; ++j)
        ok = current.rate_noma_user[j] >= cfg.min_rate_bps * (1.0 - 1e-6);
    if (cfg.mse_active() && ok) ok = current.mse <= cfg.mse_tolerance * (1.0 + 1e-6);
    report.feasible_final = ok;
  }
  return report;
}

std::vector<SolveReport> run_scheme_suite(const ChannelRealization& rel, const NetworkConfig& cfg,
                                          const std::vector<SchemeSpec>& schemes, std::uint64_t seed,
                                          const OrchestratorOptions& opt) {
  std::vector<SolveReport> reports;
  reports.reserve(schemes.size());

  // Shared random initialization: one reflection draw and full power.
  Rng rng(Rng::mix(seed, 0x1217));
  Initialization shared;
  shared.reflection = random_discrete_reflection(cfg.num_elements, cfg.phase_bits, rng);
  shared.transceiver.p.resize(cfg.num_users());
  for (int i = 0; i < cfg.num_users(); ++i) shared.transceiver.p[i] = std::sqrt(cfg.power_budget(i));
  shared.transceiver.a = 1.0;

  for (const SchemeSpec& scheme : schemes)
    reports.push_back(alternating_optimize(rel, cfg, scheme, seed, shared, opt));

  // Relaxation dominance refinement: a relaxed scheme whose heuristic landed
  // below the baseline restarts from the baseline's final point.
  int baseline = -1;
  for (std::size_t s = 0; s < schemes.size(); ++s)
    if (schemes[s].kind == SchemeSpec::Kind::DiscreteRis) baseline = static_cast<int>(s);
  if (baseline >= 0 && reports[static_cast<std::size_t>(baseline)].termination != SolveReport::Termination::Infeasible) {
    const SolveReport& base = reports[static_cast<std::size_t>(baseline)];
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const auto kind = schemes[s].kind;
      if (kind != SchemeSpec::Kind::ContinuousRis && kind != SchemeSpec::Kind::RelaxedQos &&
          kind != SchemeSpec::Kind::RelaxedMse)
        continue;
      if (reports[s].objective() >= base.objective() - 1e-12 * std::max(1.0, base.objective())) continue;
      Initialization warm;
      warm.reflection = base.reflection;
      // Map the baseline's decode-order state back to input order.
      warm.transceiver.p.resize(cfg.num_users());
      for (int i = 0; i < cfg.num_users(); ++i)
        warm.transceiver.p[base.user_order[static_cast<std::size_t>(i)]] = base.transceiver.p[i];
      warm.transceiver.a = base.transceiver.a;
      SolveReport retry = alternating_optimize(rel, cfg, schemes[s], seed, warm, opt);
      if (retry.objective() > reports[s].objective()) {
        retry.message += (retry.message.empty() ? "" : "; ");
        retry.message += "warm-started from baseline final point";
        reports[s] = std::move(retry);
      }
    }
  }
  return reports;
}

}  // namespace hybridnet
