#include "hybridnet/power_allocation.hpp"

#include <cmath>

#include "hybridnet/convex_backend.hpp"
#include "hybridnet/metrics.hpp"

namespace hybridnet {

namespace {

double hybrid_value(const RVec& gains, const RVec& p, cplx a, const NetworkConfig& cfg) {
  TransceiverState st{p, a};
  return hybrid_rate_from_gains(st, gains, cfg).rate_hybrid;
}

double alignment_sum(const RVec& coeff, const RVec& rho) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) {
    const double t = coeff[k] * std::sqrt(std::max(rho[k], 0.0)) - 1.0;
    s += t * t;
  }
  return s;
}

}  // namespace

QosCascade qos_min_powers(const RVec& gains, const RVec& p_airfl_fixed, const NetworkConfig& cfg) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  QosCascade out;
  out.rho_min = RVec::Zero(N);
  const double zeta = cfg.qos_sinr_threshold();
  double interference = cfg.noise_power_w;
  for (int k = 0; k < K; ++k) interference += p_airfl_fixed[k] * p_airfl_fixed[k] * gains[k];
  for (int j = 0; j < N; ++j) {
    const int n = K + j;
    const double need = zeta * interference / gains[n];
    out.rho_min[j] = need;
    if (need > cfg.power_budget(n) * (1.0 + 1e-9)) {
      out.feasible = false;
      out.violated_user = n;
      return out;
    }
    interference += need * gains[n];
  }
  return out;
}

double min_aggregation_error(const RVec& gains, double a_abs, const NetworkConfig& cfg, RVec* rho_opt) {
  const int K = cfg.num_airfl;
  double total = std::norm(a_abs) * cfg.noise_power_w;
  if (rho_opt) rho_opt->resize(K);
  for (int k = 0; k < K; ++k) {
    const double c = a_abs * std::sqrt(gains[k]);
    const double amp = c > 0 ? std::min(1.0 / c, std::sqrt(cfg.power_budget(k))) : std::sqrt(cfg.power_budget(k));
    const double t = c * amp - 1.0;
    total += t * t;
    if (rho_opt) (*rho_opt)[k] = amp * amp;
  }
  return total;
}

NomaPowerResult solve_noma_power(const RVec& gains, const RVec& p_airfl_fixed, const NetworkConfig& cfg) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  NomaPowerResult out;
  if (N == 0) {
    out.p_noma = RVec();
    return out;
  }

  // Screen the QoS cascade first so an unsatisfiable row is named exactly.
  const QosCascade cascade = qos_min_powers(gains, p_airfl_fixed, cfg);
  if (!cascade.feasible) {
    out.status = PowerStatus::Infeasible;
    out.violated_user = cascade.violated_user;
    out.message = "QoS row unsatisfiable for user " + std::to_string(cascade.violated_user);
    return out;
  }

  const double zeta = cfg.qos_sinr_threshold();
  double base_interference = cfg.noise_power_w;
  for (int k = 0; k < K; ++k) base_interference += p_airfl_fixed[k] * p_airfl_fixed[k] * gains[k];

  convex::LinearProgram lp;
  lp.c.resize(N);
  lp.lower = RVec::Zero(N);
  lp.upper.resize(N);
  for (int j = 0; j < N; ++j) {
    lp.c[j] = gains[K + j];
    lp.upper[j] = cfg.power_budget(K + j);
  }
  lp.A = Eigen::MatrixXd::Zero(N, N);
  lp.b = RVec::Zero(N);
  for (int j = 0; j < N; ++j) {
    // zeta * (base + sum_{j'<j} rho g) - rho_j g_j <= 0
    for (int j2 = 0; j2 < j; ++j2) lp.A(j, j2) = zeta * gains[K + j2];
    lp.A(j, j) = -gains[K + j];
    lp.b[j] = -zeta * base_interference;
    lp.row_names.push_back("QoS user " + std::to_string(K + j));
  }

  const convex::BackendSolution sol = convex::solve(lp);
  if (sol.status != convex::SolveStatus::Optimal) {
    out.status = PowerStatus::Infeasible;
    out.message = sol.message;
    return out;
  }
  out.p_noma = sol.x.cwiseMax(0.0).cwiseSqrt();
  return out;
}

AirflPowerResult solve_airfl_power(const RVec& gains, cplx a, const RVec& p_noma_fixed, const RVec& init,
                                   const NetworkConfig& cfg, const PowerOptions& opt) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  AirflPowerResult out;
  if (K == 0) {
    out.p_airfl = RVec();
    return out;
  }
  const double a_abs = std::abs(a);
  const double asq_noise = a_abs * a_abs * cfg.noise_power_w;
  const double lambda = cfg.weight_lambda;
  const double sigma2 = cfg.noise_power_w;
  const bool mse_on = cfg.mse_active();
  const double mse_cap = cfg.mse_tolerance * K * K;

  RVec coeff(K), gA(K), budget(K);
  for (int k = 0; k < K; ++k) {
    coeff[k] = a_abs * std::sqrt(gains[k]);
    gA[k] = gains[k];
    budget[k] = cfg.power_budget(k);
  }
  double fixed_noma = 0.0;
  for (int j = 0; j < N; ++j) fixed_noma += p_noma_fixed[j] * p_noma_fixed[j] * gains[K + j];

  RVec rho_mse;
  const double floor_err = min_aggregation_error(gains, a_abs, cfg, &rho_mse);
  if (mse_on && floor_err > mse_cap * (1.0 + 1e-12)) {
    out.status = PowerStatus::Infeasible;
    out.message = "aggregation error bound unattainable at any power level";
    return out;
  }

  // Interior, constraint-satisfying start.
  RVec rho(K);
  for (int k = 0; k < K; ++k) {
    const double r0 = init.size() == K ? init[k] * init[k] : 0.5 * budget[k];
    rho[k] = std::min(std::max(r0, 1e-9 * budget[k]), (1.0 - 1e-9) * budget[k]);
  }
  if (mse_on) {
    double t = 0.0;
    while (t < 1.0 && alignment_sum(coeff, rho) + asq_noise > mse_cap * (1.0 - 1e-9)) {
      t = t == 0.0 ? 0.125 : std::min(1.0, 2.0 * t);
      rho = (1.0 - t) * rho + t * rho_mse;
    }
  }

  auto p_of = [&](const RVec& r) { return r.cwiseMax(0.0).cwiseSqrt().eval(); };
  auto full_p = [&](const RVec& r) {
    RVec p(K + N);
    p.head(K) = p_of(r);
    p.tail(N) = p_noma_fixed;
    return p;
  };

  double value = hybrid_value(gains, full_p(rho), a, cfg);
  out.objective_trace.push_back(value);

  const double ln2 = M_LN2;
  for (int it = 0; it < opt.max_iters; ++it) {
    const double beta_now = alignment_sum(coeff, rho);
    const int dim = K + 1;  // rho plus the auxiliary alignment bound

    convex::SmoothProgram sp;
    sp.dim = dim;
    sp.lower = RVec::Zero(dim);
    sp.upper.resize(dim);
    for (int k = 0; k < K; ++k) sp.upper[k] = budget[k];
    double beta_ub = 1.0;
    for (int k = 0; k < K; ++k) {
      const double t = coeff[k] * std::sqrt(budget[k]) + 1.0;
      beta_ub += t * t;
    }
    sp.upper[K] = beta_ub;

    if (lambda < 1.0) {
      convex::SmoothProgram::LogTerm lt;
      lt.w = (1.0 - lambda) / ln2;
      lt.a = RVec::Zero(dim);
      lt.a.head(K) = gA;
      lt.b = fixed_noma + sigma2;
      sp.logs.push_back(lt);
    }
    if (lambda > 0.0) {
      convex::SmoothProgram::LogTerm lt;
      lt.w = lambda / ln2;
      lt.a = RVec::Zero(dim);
      for (int k = 0; k < K; ++k) lt.a[k] = coeff[k] * coeff[k];
      lt.b = asq_noise;
      sp.logs.push_back(lt);
    }
    // Linearized subtracted part.
    sp.c = RVec::Zero(dim);
    const double den1 = gA.dot(rho) + sigma2;
    for (int k = 0; k < K; ++k) sp.c[k] = -(1.0 - lambda) / ln2 * gA[k] / den1;
    sp.c[K] = -lambda / ln2 / (beta_now + asq_noise);

    {
      convex::SmoothRow bound;  // alignment sum below the auxiliary variable
      bound.q = RVec::Zero(dim);
      bound.s = RVec::Zero(dim);
      for (int k = 0; k < K; ++k) {
        bound.q[k] = coeff[k] * coeff[k];
        bound.s[k] = -2.0 * coeff[k];
      }
      bound.q[K] = -1.0;
      bound.r = K;
      bound.name = "alignment bound";
      sp.rows.push_back(bound);
    }
    if (mse_on) {
      convex::SmoothRow mse;
      mse.q = RVec::Zero(dim);
      mse.s = RVec::Zero(dim);
      for (int k = 0; k < K; ++k) {
        mse.q[k] = coeff[k] * coeff[k];
        mse.s[k] = -2.0 * coeff[k];
      }
      mse.r = K + asq_noise - mse_cap;
      mse.name = "aggregation error";
      sp.rows.push_back(mse);
    }

    sp.x_init = RVec::Zero(dim);
    sp.x_init.head(K) = rho;
    sp.x_init[K] = std::min(beta_now * (1.0 + 1e-6) + 1e-12, beta_ub * (1.0 - 1e-9));

    const convex::BackendSolution sol = convex::solve(sp);
    if (sol.status == convex::SolveStatus::Infeasible) {
      out.status = PowerStatus::Infeasible;
      out.message = "DC subproblem infeasible: " + sol.message;
      return out;
    }

    RVec rho_next = sol.x.head(K).cwiseMax(0.0).cwiseMin(budget);
    const double value_next = hybrid_value(gains, full_p(rho_next), a, cfg);
    ++out.iterations;
    if (value_next < value - 1e-9 * std::max(1.0, std::fabs(value))) break;  // keep the trace monotone
    rho = rho_next;
    out.objective_trace.push_back(value_next);
    const bool done = std::fabs(value_next - value) <= opt.tolerance * std::max(1.0, std::fabs(value));
    value = value_next;
    if (done) {
      out.status = PowerStatus::Converged;
      out.p_airfl = p_of(rho);
      return out;
    }
  }
  out.status = out.iterations >= opt.max_iters ? PowerStatus::CapReached : PowerStatus::Converged;
  out.p_airfl = p_of(rho);
  return out;
}

PowerAllocationResult allocate_power(const RVec& gains, cplx a, const RVec& init, const NetworkConfig& cfg,
                                     const PowerOptions& opt) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  PowerAllocationResult out;
  out.p = init.size() == K + N ? init : RVec::Zero(K + N);
  if (init.size() != K + N)
    for (int i = 0; i < K + N; ++i) out.p[i] = std::sqrt(cfg.power_budget(i));

  auto record = [&](double v) { out.objective_trace.push_back(v); };

  // Full power is exactly optimal for communication users without a rate floor.
  const bool qos_free = !cfg.qos_active();
  if (qos_free) {
    for (int j = 0; j < N; ++j) out.p[K + j] = std::sqrt(cfg.power_budget(K + j));
    if (K == 0) {
      record(hybrid_value(gains, out.p, a, cfg));
      return out;
    }
    const AirflPowerResult dc = solve_airfl_power(gains, a, out.p.tail(N), out.p.head(K), cfg, opt);
    if (dc.status == PowerStatus::Infeasible) {
      out.status = PowerStatus::Infeasible;
      out.message = dc.message;
      return out;
    }
    out.p.head(K) = dc.p_airfl;
    out.objective_trace = dc.objective_trace;
    out.iterations = dc.iterations;
    out.status = dc.status;
    return out;
  }

  // QoS active: start from a feasible communication block, then alternate.
  NomaPowerResult lp = solve_noma_power(gains, out.p.head(K), cfg);
  if (lp.status == PowerStatus::Infeasible && K > 0) {
    // High aggregation power can block the cascade; retry from the least
    // aggregation-error powers.
    RVec rho_mse;
    min_aggregation_error(gains, std::abs(a), cfg, &rho_mse);
    out.p.head(K) = rho_mse.cwiseSqrt();
    lp = solve_noma_power(gains, out.p.head(K), cfg);
  }
  if (lp.status == PowerStatus::Infeasible) {
    out.status = PowerStatus::Infeasible;
    out.message = lp.message;
    return out;
  }
  out.p.tail(N) = lp.p_noma;
  double value = hybrid_value(gains, out.p, a, cfg);
  record(value);
  if (K == 0) return out;

  for (int it = 0; it < opt.max_iters; ++it) {
    const AirflPowerResult dc = solve_airfl_power(gains, a, out.p.tail(N), out.p.head(K), cfg, opt);
    if (dc.status == PowerStatus::Infeasible) {
      out.status = PowerStatus::Infeasible;
      out.message = dc.message;
      return out;
    }
    const NomaPowerResult lp2 = solve_noma_power(gains, dc.p_airfl, cfg);
    if (lp2.status == PowerStatus::Infeasible) break;  // keep the previous feasible pair

    RVec cand(K + N);
    cand.head(K) = dc.p_airfl;
    cand.tail(N) = lp2.p_noma;
    const double cand_value = hybrid_value(gains, cand, a, cfg);
    ++out.iterations;
    if (cand_value < value - 1e-9 * std::max(1.0, std::fabs(value))) break;
    out.p = cand;
    record(cand_value);
    const bool done = std::fabs(cand_value - value) <= opt.tolerance * std::max(1.0, std::fabs(value));
    value = cand_value;
    if (done) break;
  }
  out.status = out.iterations >= opt.max_iters ? PowerStatus::CapReached : PowerStatus::Converged;
  return out;
}

}  // namespace hybridnet
