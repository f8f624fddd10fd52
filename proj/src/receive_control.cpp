#include "hybridnet/receive_control.hpp"

#include <cmath>
#include <stdexcept>

#include "hybridnet/metrics.hpp"

namespace hybridnet {

cplx closed_form_scalar(const CVec& airfl_channels, const RVec& p_airfl) {
  const int K = static_cast<int>(airfl_channels.size());
  if (K < 1) throw std::domain_error("closed_form_scalar: no aggregation users");
  cplx sum = 0.0;
  for (int k = 0; k < K; ++k) sum += airfl_channels[k] * p_airfl[k];
  if (std::abs(sum) < 1e-300) throw std::domain_error("closed_form_scalar: degenerate channel, zero mean product");
  return static_cast<double>(K) / sum;
}

namespace {

struct Geometry {
  int K = 0;
  cplx mean;       // mean of c_k = hbar_k p_k
  double spread = 0.0;  // sum |c_k - mean|^2
  double noise = 0.0;
};

double alignment_objective(const Geometry& g, cplx abar) {
  return g.K * std::norm(abar - g.mean) + g.spread;
}

// MSE in abar coordinates: (f(abar) + noise) / (K^2 |abar|^2).
double mse_of(const Geometry& g, cplx abar) {
  return (alignment_objective(g, abar) + g.noise) / (static_cast<double>(g.K) * g.K * std::norm(abar));
}

}  // namespace

ScalarSolveResult sca_scalar(const CVec& airfl_channels, const RVec& p_airfl, const NetworkConfig& cfg,
                             std::optional<cplx> init, const ScalarOptions& opt) {
  ScalarSolveResult out;
  const int K = static_cast<int>(airfl_channels.size());
  if (K < 1) throw std::domain_error("sca_scalar: no aggregation users");
  const double eps0 = cfg.mse_tolerance;
  const double sigma2 = cfg.noise_power_w;

  CVec c(K);
  for (int k = 0; k < K; ++k) c[k] = airfl_channels[k] * p_airfl[k];

  if (std::isinf(eps0)) {
    out.a = closed_form_scalar(airfl_channels, p_airfl);
    out.status = ScalarSolveResult::Status::Converged;
    out.iterations = 0;
    return out;
  }

  Geometry g;
  g.K = K;
  g.mean = c.mean();
  g.spread = (c.array() - g.mean).abs2().sum();
  g.noise = sigma2;
  const double K2eps = eps0 * K * K;

  // Constraint slack with |abar|^2 linearized at `at`.
  auto slack = [&](cplx abar, cplx at) {
    const double lin = 2.0 * (std::conj(at) * abar).real() - std::norm(at);
    return K2eps * lin - alignment_objective(g, abar) - sigma2;
  };

  // Pick a start that already satisfies the true constraint; if even the
  // global distortion minimum violates it, the instance is infeasible.
  cplx abar;
  if (init && std::abs(*init) > 0) {
    abar = 1.0 / *init;
  } else {
    abar = g.mean;
  }
  if (mse_of(g, abar) > eps0) {
    cplx best;
    if (std::abs(g.mean) > 1e-300) {
      const double rho = std::abs(g.mean) + (g.spread + sigma2) / (K * std::abs(g.mean));
      best = std::polar(rho, std::arg(g.mean));
    } else {
      const double floor_gap = eps0 - 1.0 / K;
      best = floor_gap > 0 ? cplx(2.0 * std::sqrt((g.spread + sigma2) / (K * K * floor_gap)), 0.0)
                           : cplx(1.0, 0.0);
    }
    if (mse_of(g, best) > eps0 * (1.0 + 1e-12)) {
      out.status = ScalarSolveResult::Status::Infeasible;
      out.message = "aggregation error bound unattainable for any receive scalar";
      return out;
    }
    abar = best;
  }

  out.objective_trace.push_back(alignment_objective(g, abar));
  double prev_rate = -1.0;
  for (int it = 0; it < opt.max_iters; ++it) {
    cplx next;
    if (slack(g.mean, abar) >= 0.0) {
      next = g.mean;  // unconstrained optimum already feasible
    } else {
      const cplx u = K2eps / static_cast<double>(K) * abar;  // eps0*K*abar
      if (slack(g.mean + u, abar) < 0.0) {
        out.status = ScalarSolveResult::Status::Infeasible;
        out.message = "linearized aggregation-error bound empty at current iterate";
        return out;
      }
      double lo = 0.0, hi = 1.0;  // slack is monotone along mean + t*u
      for (int b = 0; b < 100; ++b) {
        const double mid = 0.5 * (lo + hi);
        if (slack(g.mean + mid * u, abar) >= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      next = g.mean + hi * u;
    }

    abar = next;
    out.objective_trace.push_back(alignment_objective(g, abar));
    ++out.iterations;

    const double mse = mse_of(g, abar);
    const double signal = ((c.array() / abar).abs2().sum() + sigma2 / std::norm(abar)) / (K * K);
    const double rate = cfg.bandwidth_hz * std::max(0.0, std::log2(signal / mse));
    out.rate_trace.push_back(rate);
    if (prev_rate >= 0 && std::fabs(rate - prev_rate) <= opt.tolerance * std::max(1.0, std::fabs(prev_rate))) {
      out.status = ScalarSolveResult::Status::Converged;
      out.a = 1.0 / abar;
      return out;
    }
    prev_rate = rate;
  }
  out.status = ScalarSolveResult::Status::CapReached;
  out.a = 1.0 / abar;
  return out;
}

}  // namespace hybridnet
