#include "hybridnet/reflection_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace hybridnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FrozenProducts {
  RVec gains;   // |hbar_i|^2 per user
  CVec agg;     // a * hbar_k * p_k * rotation_k per aggregation user
};

FrozenProducts products_at(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                           const NetworkConfig& cfg, const RVec& theta) {
  ReflectionState refl{theta, ReflectionState::Mode::Continuous};
  const CVec hbar = combined_channel(rel, refl);
  FrozenProducts out;
  out.gains = channel_gains(hbar);
  out.agg.resize(cfg.num_airfl);
  for (int k = 0; k < cfg.num_airfl; ++k)
    out.agg[k] = txrx.a * hbar[k] * txrx.p[k] * txrx.rotation[k];
  return out;
}

double score_from_products(const FrozenProducts& fp, const FrozenTransceiver& txrx,
                           const NetworkConfig& cfg) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  const double lambda = cfg.weight_lambda;
  double value = 0.0;
  if (N > 0 && lambda < 1.0) {
    double base = cfg.noise_power_w, sig = 0.0;
    for (int k = 0; k < K; ++k) base += txrx.p[k] * txrx.p[k] * fp.gains[k];
    for (int j = 0; j < N; ++j) sig += txrx.p[K + j] * txrx.p[K + j] * fp.gains[K + j];
    value += (1.0 - lambda) * cfg.bandwidth_hz * std::log2(1.0 + sig / base);
  }
  if (K > 0 && lambda > 0.0) {
    const double noise = std::norm(txrx.a) * cfg.noise_power_w;
    double sig = noise, err = noise;
    for (int k = 0; k < K; ++k) {
      sig += std::norm(fp.agg[k]);
      err += std::norm(fp.agg[k] - 1.0);
    }
    value += lambda * cfg.bandwidth_hz * std::log2(sig / err);
  }
  return value;
}

CandidateCheck check_from_products(const FrozenProducts& fp, const FrozenTransceiver& txrx,
                                   const NetworkConfig& cfg) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  CandidateCheck out;
  out.ordering = ordering_satisfied(fp.gains, K, N);

  if (cfg.qos_active()) {
    const double zeta = cfg.qos_sinr_threshold();
    out.qos_margin = kInf;
    double interference = cfg.noise_power_w;
    for (int k = 0; k < K; ++k) interference += txrx.p[k] * txrx.p[k] * fp.gains[k];
    for (int j = 0; j < N; ++j) {
      const int n = K + j;
      const double gamma = txrx.p[n] * txrx.p[n] * fp.gains[n] / interference;
      out.qos_margin = std::min(out.qos_margin, gamma / zeta - 1.0);
      interference += txrx.p[n] * txrx.p[n] * fp.gains[n];
    }
    out.qos = out.qos_margin >= -1e-9;
  }
  if (cfg.mse_active()) {
    const double noise = std::norm(txrx.a) * cfg.noise_power_w;
    double err = noise;
    for (int k = 0; k < K; ++k) err += std::norm(fp.agg[k] - 1.0);
    const double mse = err / (static_cast<double>(K) * K);
    out.mse_margin = 1.0 - mse / cfg.mse_tolerance;
    out.mse = out.mse_margin >= -1e-9;

    // Best rescaling s of the receive scalar on compensated magnitudes:
    // minimize sum (s m_k - 1)^2 + s^2 |a|^2 sigma^2 in closed form.
    double msum = 0.0, msq = noise;
    for (int k = 0; k < K; ++k) {
      const double m = std::abs(fp.agg[k]);
      msum += m;
      msq += m * m;
    }
    const double s = msq > 0 ? msum / msq : 0.0;
    double refit = noise * s * s;
    for (int k = 0; k < K; ++k) {
      const double t = s * std::abs(fp.agg[k]) - 1.0;
      refit += t * t;
    }
    out.mse_margin_refit = 1.0 - refit / (static_cast<double>(K) * K) / cfg.mse_tolerance;
  }
  return out;
}

CMat diag_lift(const CVec& phi) {
  const int M = static_cast<int>(phi.size());
  CMat out = CMat::Zero(M + 1, M + 1);
  out.topLeftCorner(M, M) = phi * phi.adjoint();
  return out;
}

}  // namespace

FrozenTransceiver FrozenTransceiver::freeze(const TransceiverState& state, const CVec& current_channels,
                                            int num_airfl) {
  FrozenTransceiver out;
  out.p = state.p;
  out.a = state.a;
  out.rotation.resize(num_airfl);
  for (int k = 0; k < num_airfl; ++k) {
    const cplx prod = state.a * current_channels[k];
    out.rotation[k] = std::abs(prod) > 0 ? std::conj(prod) / std::abs(prod) : cplx(1.0, 0.0);
  }
  return out;
}

LiftedProblemData lift(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                       const NetworkConfig& cfg) {
  const int M = rel.num_elements();
  const int K = cfg.num_airfl;
  if (rel.num_users() != cfg.num_users())
    throw std::invalid_argument("lift: realization does not match config");

  LiftedProblemData out;
  out.num_elements = M;
  out.scaled_noise = std::norm(txrx.a) * cfg.noise_power_w;
  out.lifted_gain.reserve(rel.num_users());
  for (int i = 0; i < rel.num_users(); ++i)
    out.lifted_gain.push_back(diag_lift(rel.phi_scaled[static_cast<std::size_t>(i)]));
  out.phi_hat.reserve(K);
  out.lifted_signal.reserve(K);
  out.lifted_misalign.reserve(K);
  for (int k = 0; k < K; ++k) {
    const CVec ph = txrx.a * txrx.p[k] * txrx.rotation[k] * rel.phi_scaled[static_cast<std::size_t>(k)];
    out.phi_hat.push_back(ph);
    out.lifted_signal.push_back(diag_lift(ph));
    CMat mis = CMat::Zero(M + 1, M + 1);
    mis.topLeftCorner(M, M) = ph * ph.adjoint();
    mis.topRightCorner(M, 1) = -ph;
    mis.bottomLeftCorner(1, M) = -ph.adjoint();
    out.lifted_misalign.push_back(std::move(mis));
  }
  return out;
}

CVec lifted_vector(const ReflectionState& refl) {
  const int M = refl.num_elements();
  CVec vbar(M + 1);
  vbar.head(M) = refl.phase_vector().conjugate();
  vbar[M] = 1.0;
  return vbar;
}

RVec theta_from_lifted(const CVec& vbar) {
  const int M = static_cast<int>(vbar.size()) - 1;
  RVec theta(M);
  for (int m = 0; m < M; ++m) theta[m] = wrap_angle(std::arg(std::conj(vbar[m]) * vbar[M]));
  return theta;
}

double reflection_score(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                        const NetworkConfig& cfg, const RVec& theta) {
  return score_from_products(products_at(rel, txrx, cfg, theta), txrx, cfg);
}

CandidateCheck check_candidate(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                               const NetworkConfig& cfg, const RVec& theta) {
  return check_from_products(products_at(rel, txrx, cfg, theta), txrx, cfg);
}

ReflectionDcResult solve_relaxed_sdp(const LiftedProblemData& lifted, const FrozenTransceiver& txrx,
                                     const NetworkConfig& cfg, const CMat& V_init,
                                     const ReflectionOptions& opt) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  const int n = lifted.num_elements + 1;
  const double lambda = cfg.weight_lambda;
  const double ln2 = M_LN2;
  const double B = cfg.bandwidth_hz;
  ReflectionDcResult out;

  // Aggregate objective matrices.
  CMat gain_all = CMat::Zero(n, n);   // sum_i p_i^2 lifted_gain_i
  CMat gain_agg = CMat::Zero(n, n);   // aggregation users only
  CMat signal_agg = CMat::Zero(n, n);
  CMat misalign_agg = CMat::Zero(n, n);
  for (int i = 0; i < cfg.num_users(); ++i)
    gain_all += txrx.p[i] * txrx.p[i] * lifted.lifted_gain[static_cast<std::size_t>(i)];
  for (int k = 0; k < K; ++k) {
    gain_agg += txrx.p[k] * txrx.p[k] * lifted.lifted_gain[static_cast<std::size_t>(k)];
    signal_agg += lifted.lifted_signal[static_cast<std::size_t>(k)];
    misalign_agg += lifted.lifted_misalign[static_cast<std::size_t>(k)];
  }
  const double noise = cfg.noise_power_w;
  const double anoise = lifted.scaled_noise;

  std::vector<convex::SdpRow> rows;
  if (N > 0) {
    for (int k = 0; k < K; ++k)
      rows.push_back({lifted.lifted_gain[static_cast<std::size_t>(k)] -
                          lifted.lifted_gain[static_cast<std::size_t>(K)],
                      0.0, "ordering agg user " + std::to_string(k)});
    for (int j = 0; j + 1 < N; ++j)
      rows.push_back({lifted.lifted_gain[static_cast<std::size_t>(K + j)] -
                          lifted.lifted_gain[static_cast<std::size_t>(K + j + 1)],
                      0.0, "ordering chain " + std::to_string(j)});
  }
  if (cfg.qos_active() && !opt.feasibility_objective) {
    const double zeta = cfg.qos_sinr_threshold();
    for (int j = 0; j < N; ++j) {
      CMat R = -txrx.p[K + j] * txrx.p[K + j] * lifted.lifted_gain[static_cast<std::size_t>(K + j)];
      for (int i = 0; i < K + j; ++i)
        R += zeta * txrx.p[i] * txrx.p[i] * lifted.lifted_gain[static_cast<std::size_t>(i)];
      rows.push_back({std::move(R), -zeta * noise, "rate floor user " + std::to_string(K + j)});
    }
  }
  if (cfg.mse_active() && !opt.feasibility_objective) {
    const double cap = cfg.mse_tolerance * K * K - K - anoise;
    rows.push_back({misalign_agg, cap, "aggregation error"});
  }

  auto true_value = [&](const CMat& V) -> double {
    double val = 0.0;
    if (lambda < 1.0 && N > 0) {
      const double num = (gain_all.cwiseProduct(V.transpose())).sum().real() + noise;
      const double den = (gain_agg.cwiseProduct(V.transpose())).sum().real() + noise;
      val += (1.0 - lambda) * B * std::log2(num / den);
    }
    if (lambda > 0.0 && K > 0) {
      const double num = (signal_agg.cwiseProduct(V.transpose())).sum().real() + anoise;
      const double den = (misalign_agg.cwiseProduct(V.transpose())).sum().real() + K + anoise;
      val += lambda * B * std::log2(num / den);
    }
    return val;
  };

  CMat V = V_init;
  double value = true_value(V);
  out.objective_trace.push_back(value);
  out.relaxation_bound = kInf;

  const int iters = opt.feasibility_objective ? 1 : opt.dc_max_iters;
  for (int it = 0; it < iters; ++it) {
    convex::SdpLogProgram prog;
    prog.dim = n;
    prog.V_init = V;
    prog.mu0_fraction = it == 0 ? 0.1 : 1e-3;  // later rounds start interior
    if (opt.feasibility_objective) {
      prog.C = (gain_all + signal_agg) / std::max(1.0, gain_all.norm() + signal_agg.norm());
    } else {
      // Minorize-maximize round: the subtracted logs are concave in V, so
      // their tangents at the iterate majorize them and the surrogate below
      // minorizes the true objective while touching it at V.
      if (lambda < 1.0 && N > 0)
        prog.logs.push_back({(1.0 - lambda) * B / ln2, gain_all, noise});
      if (lambda > 0.0 && K > 0)
        prog.logs.push_back({lambda * B / ln2, signal_agg, anoise});
      CMat C = CMat::Zero(n, n);
      if (lambda < 1.0 && N > 0) {
        const double den = (gain_agg.cwiseProduct(V.transpose())).sum().real() + noise;
        C -= (1.0 - lambda) * B / ln2 / den * gain_agg;
      }
      if (lambda > 0.0 && K > 0) {
        const double den = (misalign_agg.cwiseProduct(V.transpose())).sum().real() + K + anoise;
        C -= lambda * B / ln2 / den * misalign_agg;
      }
      prog.C = C;
    }

    const convex::SdpSolution sol = convex::solve_sdp(prog, rows);
    ++out.iterations;
    for (std::size_t t = 0; t < sol.row_relaxation.size(); ++t)
      if (sol.row_relaxation[t] > 1e-6 * (1.0 + std::fabs(rows[t].c)))
        out.relaxed_rows.push_back(rows[t].name);

    if (opt.diagnostics) {
      Eigen::SelfAdjointEigenSolver<CMat> es(sol.V, Eigen::EigenvaluesOnly);
      out.eigenspectra.push_back(es.eigenvalues());
    }

    const double next_value = true_value(sol.V);
    if (opt.feasibility_objective) {
      V = sol.V;
      out.objective_trace.push_back(next_value);
      break;
    }
    if (next_value < value - 1e-9 * std::max(1.0, std::fabs(value))) break;
    V = sol.V;
    out.objective_trace.push_back(next_value);
    const bool done = std::fabs(next_value - value) <= opt.dc_tolerance * std::max(1.0, std::fabs(value));
    value = next_value;
    if (done) break;
  }
  out.V = V;

  // Certified upper bound on the relaxed problem: replace each subtracted
  // log with its chord over the achievable trace range (the chord sits below
  // a concave log), leaving a concave problem whose optimum dominates every
  // feasible configuration, rank-one or not.
  if (!opt.feasibility_objective) {
    bool certifiable = true;
    CMat C_chord = CMat::Zero(n, n);
    double chord_const = 0.0;
    if (lambda < 1.0 && N > 0) {
      const double lb = noise;
      Eigen::SelfAdjointEigenSolver<CMat> es(gain_agg, Eigen::EigenvaluesOnly);
      double ub = noise + n * std::max(0.0, es.eigenvalues().maxCoeff());
      ub = std::max(ub, lb * (1.0 + 1e-9));
      const double slope = (std::log2(ub) - std::log2(lb)) / (ub - lb);
      C_chord -= (1.0 - lambda) * B * slope * gain_agg;
      chord_const += (1.0 - lambda) * B * (std::log2(lb) + slope * (noise - lb));
      if (!(lb > 0)) certifiable = false;
    }
    if (lambda > 0.0 && K > 0) {
      // tr(misalign_k V) + 1 >= 0 for every PSD V with unit diagonal, so the
      // argument never drops below the scaled noise.
      const double lb = anoise;
      Eigen::SelfAdjointEigenSolver<CMat> es(misalign_agg, Eigen::EigenvaluesOnly);
      double ub = K + anoise + n * std::max(0.0, es.eigenvalues().maxCoeff());
      ub = std::max(ub, lb * (1.0 + 1e-9));
      const double slope = (std::log2(ub) - std::log2(lb)) / (ub - lb);
      C_chord -= lambda * B * slope * misalign_agg;
      chord_const += lambda * B * (std::log2(lb) + slope * (K + anoise - lb));
      if (!(lb > 0)) certifiable = false;
    }
    if (certifiable) {
      convex::SdpLogProgram bound_prog;
      bound_prog.dim = n;
      bound_prog.V_init = V;
      bound_prog.mu0_fraction = 1e-3;
      if (lambda < 1.0 && N > 0)
        bound_prog.logs.push_back({(1.0 - lambda) * B / ln2, gain_all, noise});
      if (lambda > 0.0 && K > 0)
        bound_prog.logs.push_back({lambda * B / ln2, signal_agg, anoise});
      bound_prog.C = C_chord;
      const convex::SdpSolution bsol = convex::solve_sdp(bound_prog, rows);
      out.relaxation_bound = bsol.objective - chord_const + bsol.barrier_gap;
    }
  }
  return out;
}

std::vector<RVec> recover_rank_one(const CMat& V, int count, Rng& rng) {
  const int n = static_cast<int>(V.rows());
  std::vector<RVec> cands;
  Eigen::SelfAdjointEigenSolver<CMat> es(V);
  const RVec evals = es.eigenvalues();
  const double top = evals[n - 1];
  const double second = n >= 2 ? evals[n - 2] : 0.0;

  {
    // Leading eigenvector candidate (exact when V is rank-one).
    CVec vbar = es.eigenvectors().col(n - 1);
    cands.push_back(theta_from_lifted(vbar));
  }
  if (second <= 1e-8 * top) return cands;  // numerically rank-one: exact factorization

  // Gaussian samples shaped by V, projected to unit modulus with the last
  // entry normalized away.
  CMat shaper = es.eigenvectors();
  for (int i = 0; i < n; ++i) shaper.col(i) *= std::sqrt(std::max(evals[i], 0.0));
  for (int c = 0; c < count; ++c) {
    CVec z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.cgauss();
    cands.push_back(theta_from_lifted(shaper * z));
  }
  return cands;
}

ReflectionState quantize(const RVec& theta_continuous, int phase_bits) {
  const int levels = 1 << phase_bits;
  const double step = kTwoPi / levels;
  ReflectionState out;
  out.mode = ReflectionState::Mode::Discrete;
  out.theta.resize(theta_continuous.size());
  for (Eigen::Index m = 0; m < theta_continuous.size(); ++m) {
    const double t = wrap_angle(theta_continuous[m]) / step - 0.5;
    double j = std::floor(t + 0.5);
    if (t - std::floor(t) == 0.5) {
      // Exactly between two admissible values: take the smaller element
      // (index 0 at the wrap-around seam).
      j = std::max(std::floor(t), 0.0);
    }
    long idx = static_cast<long>(j) % levels;
    if (idx < 0) idx += levels;
    out.theta[m] = (static_cast<double>(idx) + 0.5) * step;
  }
  return out;
}

RVec polish_phases(const ChannelRealization& rel, const FrozenTransceiver& txrx, const NetworkConfig& cfg,
                   RVec theta, int passes) {
  auto masked = [&](const RVec& t) {
    const FrozenProducts fp = products_at(rel, txrx, cfg, t);
    return check_from_products(fp, txrx, cfg).ok() ? score_from_products(fp, txrx, cfg) : -kInf;
  };
  const int M = static_cast<int>(theta.size());
  double best = masked(theta);
  if (std::isinf(best)) return theta;  // start infeasible; nothing to refine against

  for (int pass = 0; pass < passes; ++pass) {
    for (int m = 0; m < M; ++m) {
      RVec t = theta;
      // Coarse scan then golden-section refinement around the best angle.
      double scan_best = best, scan_theta = theta[m];
      constexpr int kScan = 16;
      for (int s = 0; s < kScan; ++s) {
        t[m] = s * kTwoPi / kScan;
        const double v = masked(t);
        if (v > scan_best) {
          scan_best = v;
          scan_theta = t[m];
        }
      }
      double lo = scan_theta - kTwoPi / kScan, hi = scan_theta + kTwoPi / kScan;
      const double gr = 0.6180339887498949;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      t[m] = x1;
      double f1 = masked(t);
      t[m] = x2;
      double f2 = masked(t);
      for (int it = 0; it < 30; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          t[m] = x2;
          f2 = masked(t);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          t[m] = x1;
          f1 = masked(t);
        }
      }
      const double cand_theta = f1 > f2 ? x1 : x2;
      const double cand_val = std::max(f1, f2);
      if (std::max(cand_val, scan_best) > best) {
        if (cand_val >= scan_best) {
          theta[m] = wrap_angle(cand_theta);
          best = cand_val;
        } else {
          theta[m] = wrap_angle(scan_theta);
          best = scan_best;
        }
      }
    }
  }
  return theta;
}

ExhaustiveResult exhaustive_search(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                                   const NetworkConfig& cfg, std::uint64_t cap) {
  const int M = rel.num_elements();
  const int levels = cfg.phase_levels();
  const double step = cfg.phase_step();
  double total_d = std::pow(static_cast<double>(levels), M);
  if (total_d > static_cast<double>(cap))
    throw std::invalid_argument("exhaustive_search: needs " + std::to_string(total_d) +
                                " candidates, above the cap of " + std::to_string(cap));

  const int I = cfg.num_users();
  const int K = cfg.num_airfl;

  std::vector<int> digit(static_cast<std::size_t>(M), 0);
  CVec totals = CVec::Zero(I);
  std::vector<CVec> contrib(static_cast<std::size_t>(M));  // current contribution per element
  for (int m = 0; m < M; ++m) {
    CVec c(I);
    const cplx ph = std::polar(1.0, 0.5 * step);
    for (int i = 0; i < I; ++i) c[i] = ph * rel.phi_scaled[static_cast<std::size_t>(i)][m];
    contrib[static_cast<std::size_t>(m)] = c;
    totals += c;
  }

  ExhaustiveResult out;
  out.best_score = -kInf;
  double best_margin_val = -kInf;
  RVec theta(M);

  while (true) {
    ++out.enumerated;
    FrozenProducts fp;
    fp.gains.resize(I);
    for (int i = 0; i < I; ++i) fp.gains[i] = std::norm(totals[i]);
    const bool ordered = ordering_satisfied(fp.gains, K, cfg.num_noma);
    if (ordered) {
      fp.agg.resize(K);
      for (int k = 0; k < K; ++k) fp.agg[k] = txrx.a * totals[k] * txrx.p[k] * txrx.rotation[k];
      const CandidateCheck chk = check_from_products(fp, txrx, cfg);
      if (chk.ok()) {
        const double s = score_from_products(fp, txrx, cfg);
        if (s > out.best_score) {
          out.best_score = s;
          for (int m = 0; m < M; ++m) theta[m] = (digit[static_cast<std::size_t>(m)] + 0.5) * step;
          out.best = ReflectionState{theta, ReflectionState::Mode::Discrete};
        }
      } else {
        double margin = kInf;
        if (cfg.qos_active()) margin = std::min(margin, chk.qos_margin);
        if (cfg.mse_active()) margin = std::min(margin, chk.mse_margin_refit);
        if (margin > best_margin_val) {
          best_margin_val = margin;
          for (int m = 0; m < M; ++m) theta[m] = (digit[static_cast<std::size_t>(m)] + 0.5) * step;
          out.best_margin = ReflectionState{theta, ReflectionState::Mode::Discrete};
        }
      }
    }

    // Mixed-radix odometer with incremental channel updates.
    int m = 0;
    while (m < M) {
      auto& d = digit[static_cast<std::size_t>(m)];
      ++d;
      const bool rolled = d == levels;
      if (rolled) d = 0;
      const cplx ph = std::polar(1.0, (d + 0.5) * step);
      CVec fresh(I);
      for (int i = 0; i < I; ++i) fresh[i] = ph * rel.phi_scaled[static_cast<std::size_t>(i)][m];
      totals += fresh - contrib[static_cast<std::size_t>(m)];
      contrib[static_cast<std::size_t>(m)] = fresh;
      if (!rolled) break;
      ++m;
    }
    if (m == M) break;
  }
  return out;
}

ReflectionStepResult reflection_step(const ChannelRealization& rel, const FrozenTransceiver& txrx,
                                     const NetworkConfig& cfg, const ReflectionState& current,
                                     ReflectionState::Mode mode, Rng& rng, const ReflectionOptions& opt) {
  ReflectionStepResult out;
  const int M = rel.num_elements();

  const bool small_discrete = mode == ReflectionState::Mode::Discrete &&
                              cfg.phase_bits * M <= opt.exhaustive_bit_threshold &&
                              std::pow(static_cast<double>(cfg.phase_levels()), M) <=
                                  static_cast<double>(opt.enumeration_cap);
  if (small_discrete) {
    out.method = ReflectionStepResult::Method::Exhaustive;
    const ExhaustiveResult ex = exhaustive_search(rel, txrx, cfg, opt.enumeration_cap);
    if (ex.best) {
      out.reflection = ex.best;
      out.score = ex.best_score;
    } else if (opt.feasibility_objective && ex.best_margin) {
      out.reflection = ex.best_margin;
      out.used_fallback = true;
    } else {
      out.used_fallback = true;
      out.message = "no feasible discrete pattern";
    }
    return out;
  }

  out.method = mode == ReflectionState::Mode::Continuous ? ReflectionStepResult::Method::ContinuousRelax
                                                         : ReflectionStepResult::Method::RelaxThenQuantize;
  const LiftedProblemData lifted = lift(rel, txrx, cfg);
  const CVec vbar = lifted_vector(current);
  const CMat V_init = vbar * vbar.adjoint();
  const ReflectionDcResult dc = solve_relaxed_sdp(lifted, txrx, cfg, V_init, opt);
  out.dc_trace = dc.objective_trace;
  out.relaxation_bound = dc.relaxation_bound;
  out.eigenspectra = dc.eigenspectra;

  std::vector<RVec> pool = recover_rank_one(dc.V, opt.randomization_count, rng);
  pool.push_back(current.theta);  // incumbent: a feasible start

  auto margin_of = [&](const CandidateCheck& chk) {
    double margin = kInf;
    if (cfg.qos_active()) margin = std::min(margin, chk.qos_margin);
    if (cfg.mse_active()) margin = std::min(margin, chk.mse_margin_refit);
    return margin;
  };
  auto feasible_score = [&](const RVec& theta, double* score) {
    const FrozenProducts fp = products_at(rel, txrx, cfg, theta);
    const CandidateCheck chk = check_from_products(fp, txrx, cfg);
    if (!chk.ok()) return false;
    *score = score_from_products(fp, txrx, cfg);
    return true;
  };

  // Continuous side: pick the best feasible candidate and refine it.
  double best_cont = -kInf;
  RVec best_cont_theta;
  for (const RVec& theta : pool) {
    double s;
    if (feasible_score(theta, &s) && s > best_cont) {
      best_cont = s;
      best_cont_theta = theta;
    }
  }
  if (opt.polish_passes > 0) {
    const RVec start = best_cont_theta.size() ? best_cont_theta : current.theta;
    const RVec polished = polish_phases(rel, txrx, cfg, start, opt.polish_passes);
    double s;
    if (feasible_score(polished, &s) && s > best_cont) {
      best_cont = s;
      best_cont_theta = polished;
    }
  }

  // Discrete side. Nearest rounding often breaks the gain ordering, so try a
  // family of common-phase shifts before rounding (the gains are invariant to
  // a shared phase) and then refine element by element over the admissible set.
  const int levels = cfg.phase_levels();
  const double step = cfg.phase_step();
  double best_disc = -kInf, best_disc_margin = -kInf;
  RVec best_disc_theta;
  std::optional<ReflectionState> fallback;
  auto consider_discrete = [&](const RVec& theta_disc) {
    double s;
    if (feasible_score(theta_disc, &s)) {
      if (s > best_disc) {
        best_disc = s;
        best_disc_theta = theta_disc;
      }
    } else if (opt.feasibility_objective) {
      const CandidateCheck chk = check_candidate(rel, txrx, cfg, theta_disc);
      if (chk.ordering) {
        const double mg = margin_of(chk);
        if (mg > best_disc_margin) {
          best_disc_margin = mg;
          fallback = ReflectionState{theta_disc, ReflectionState::Mode::Discrete};
        }
      }
    }
  };

  consider_discrete(quantize(current.theta, cfg.phase_bits).theta);
  std::vector<RVec> round_sources;
  if (best_cont_theta.size()) round_sources.push_back(best_cont_theta);
  for (const RVec& theta : pool) round_sources.push_back(theta);
  const std::size_t source_cap = 8;
  for (std::size_t i = 0; i < round_sources.size() && i < source_cap; ++i) {
    for (int shift = 0; shift < 16; ++shift) {
      const RVec shifted = round_sources[i].array() + shift * step / 16.0;
      consider_discrete(quantize(shifted, cfg.phase_bits).theta);
    }
  }
  if (best_disc_theta.size()) {
    // Single-element refinement within the admissible set.
    for (int pass = 0; pass < 3; ++pass) {
      bool improved = false;
      for (int m = 0; m < M; ++m) {
        RVec t = best_disc_theta;
        for (int l = 0; l < levels; ++l) {
          t[m] = (l + 0.5) * step;
          double s;
          if (feasible_score(t, &s) && s > best_disc + 1e-12 * std::fabs(best_disc)) {
            best_disc = s;
            best_disc_theta = t;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }

  if (mode == ReflectionState::Mode::Continuous) {
    // Discrete candidates are valid continuous ones; fold them in so the
    // continuous result never trails the discrete recovery.
    if (best_disc > best_cont) {
      best_cont = best_disc;
      best_cont_theta = best_disc_theta;
    }
    if (best_cont_theta.size()) {
      out.reflection = ReflectionState{best_cont_theta, ReflectionState::Mode::Continuous};
      out.score = best_cont;
      return out;
    }
  } else if (best_disc_theta.size()) {
    out.reflection = ReflectionState{best_disc_theta, ReflectionState::Mode::Discrete};
    out.score = best_disc;
    return out;
  }

  if (fallback) {
    out.reflection = fallback;
    out.used_fallback = true;
  } else {
    out.used_fallback = true;
    out.message = "no feasible candidate from randomization";
  }
  return out;
}

}  // namespace hybridnet
