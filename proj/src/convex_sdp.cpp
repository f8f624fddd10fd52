#include "hybridnet/convex_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace hybridnet::convex {

namespace {

double re_trace_prod(const CMat& X, const CMat& Y) {
  // tr(X Y) for Hermitian X, Y; imaginary parts cancel.
  return (X.cwiseProduct(Y.transpose())).sum().real();
}

double log_det_psd(const Eigen::LLT<CMat>& llt) {
  double s = 0.0;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i) s += std::log(L(i, i).real());
  return 2.0 * s;
}

}  // namespace

SdpSolution solve_sdp(const SdpLogProgram& prog, const std::vector<SdpRow>& rows_in,
                      const SolveOptions& opt) {
  SdpSolution out;
  const int n = prog.dim;
  const int T = static_cast<int>(rows_in.size());

  // Normalize every bundle matrix to unit Frobenius norm so the Newton
  // system mixes comparable scales.
  struct Bundle {
    CMat B;        // normalized Hermitian
    double alpha;  // original Frobenius norm
  };
  std::vector<Bundle> logsB;
  std::vector<double> log_w, log_b;
  for (const auto& lt : prog.logs) {
    if (lt.w == 0.0) continue;
    const double a = lt.A.norm();
    logsB.push_back({lt.A / (a > 0 ? a : 1.0), a > 0 ? a : 1.0});
    log_w.push_back(lt.w);
    log_b.push_back(lt.b);
  }
  std::vector<Bundle> rowsB;
  std::vector<double> row_c;
  for (const auto& r : rows_in) {
    const double a = r.R.norm();
    rowsB.push_back({r.R / (a > 0 ? a : 1.0), a > 0 ? a : 1.0});
    row_c.push_back(r.c / (a > 0 ? a : 1.0));
  }
  const int J = static_cast<int>(logsB.size());
  const bool has_C = prog.C.size() > 0;

  // Strictly interior start with exact unit diagonal.
  CMat V = prog.V_init.size() ? prog.V_init : CMat::Identity(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = 1.0;
  V = 0.5 * (V + V.adjoint().eval());
  double tau = 1e-3;
  while (tau < 1.0) {
    CMat Vb = (1.0 - tau) * V + tau * CMat::Identity(n, n);
    Eigen::LLT<CMat> llt(Vb);
    if (llt.info() == Eigen::Success) {
      // Require a tiny margin so the first Newton steps are well posed.
      Eigen::SelfAdjointEigenSolver<CMat> es(Vb, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() > 1e-8) {
        V = Vb;
        break;
      }
    }
    tau *= 4.0;
  }
  if (tau >= 1.0) V = CMat::Identity(n, n);

  // Loosen rows the start violates; report the amounts in original units.
  out.row_relaxation.assign(static_cast<std::size_t>(T), 0.0);
  for (int t = 0; t < T; ++t) {
    const double val = re_trace_prod(rowsB[static_cast<std::size_t>(t)].B, V);
    const double need = val + 1e-7 * (1.0 + std::fabs(row_c[static_cast<std::size_t>(t)]));
    if (row_c[static_cast<std::size_t>(t)] < need) {
      out.row_relaxation[static_cast<std::size_t>(t)] =
          (need - row_c[static_cast<std::size_t>(t)]) * rowsB[static_cast<std::size_t>(t)].alpha;
      row_c[static_cast<std::size_t>(t)] = need;
    }
  }

  auto objective = [&](const CMat& Vm) -> double {
    double f = has_C ? re_trace_prod(prog.C, Vm) : 0.0;
    for (int j = 0; j < J; ++j) {
      const double d = logsB[static_cast<std::size_t>(j)].alpha *
                           re_trace_prod(logsB[static_cast<std::size_t>(j)].B, Vm) +
                       log_b[static_cast<std::size_t>(j)];
      if (!(d > 0)) return -std::numeric_limits<double>::infinity();
      f += log_w[static_cast<std::size_t>(j)] * std::log(d);
    }
    return f;
  };

  const double scale0 = std::max(1.0, std::fabs(objective(V)));
  double mu = std::max(prog.mu0_fraction, 1e-9) * scale0;
  const double mu_min = std::min(1e-10 * scale0, mu);

  auto barrier_value = [&](const CMat& Vm, const Eigen::LLT<CMat>& llt, double mu_now,
                           bool* ok) -> double {
    *ok = true;
    double psi = -objective(Vm);
    if (std::isinf(psi)) {
      *ok = false;
      return psi;
    }
    psi -= mu_now * log_det_psd(llt);
    for (int t = 0; t < T; ++t) {
      const double s = row_c[static_cast<std::size_t>(t)] -
                       re_trace_prod(rowsB[static_cast<std::size_t>(t)].B, Vm);
      if (!(s > 0)) {
        *ok = false;
        return std::numeric_limits<double>::infinity();
      }
      psi -= mu_now * std::log(s);
    }
    return psi;
  };

  Eigen::LLT<CMat> lltV(V);
  int total_newton = 0;

  while (true) {
    for (int inner = 0; inner < 60; ++inner) {
      ++total_newton;
      const CMat W = lltV.solve(CMat::Identity(n, n));

      // Gradient of the barrier objective (minimization form).
      CMat G = -mu * W;
      if (has_C) G -= prog.C;
      std::vector<double> dvals(static_cast<std::size_t>(J));
      for (int j = 0; j < J; ++j) {
        const auto& bb = logsB[static_cast<std::size_t>(j)];
        const double d = bb.alpha * re_trace_prod(bb.B, V) + log_b[static_cast<std::size_t>(j)];
        dvals[static_cast<std::size_t>(j)] = d;
        G -= (log_w[static_cast<std::size_t>(j)] * bb.alpha / d) * bb.B;
      }
      std::vector<double> svals(static_cast<std::size_t>(T));
      for (int t = 0; t < T; ++t) {
        const auto& bb = rowsB[static_cast<std::size_t>(t)];
        const double s = row_c[static_cast<std::size_t>(t)] - re_trace_prod(bb.B, V);
        svals[static_cast<std::size_t>(t)] = s;
        G += (mu / s) * bb.B;
      }

      // Low-rank curvature bundles: log terms and row barriers.
      const int q = J + T;
      std::vector<const CMat*> B(static_cast<std::size_t>(q));
      std::vector<double> gamma(static_cast<std::size_t>(q));
      for (int j = 0; j < J; ++j) {
        B[static_cast<std::size_t>(j)] = &logsB[static_cast<std::size_t>(j)].B;
        const double af = logsB[static_cast<std::size_t>(j)].alpha / dvals[static_cast<std::size_t>(j)];
        gamma[static_cast<std::size_t>(j)] = log_w[static_cast<std::size_t>(j)] * af * af;
      }
      for (int t = 0; t < T; ++t) {
        B[static_cast<std::size_t>(J + t)] = &rowsB[static_cast<std::size_t>(t)].B;
        gamma[static_cast<std::size_t>(J + t)] =
            mu / (svals[static_cast<std::size_t>(t)] * svals[static_cast<std::size_t>(t)]);
      }

      // Newton system via the Kronecker structure of mu*W E W plus a
      // low-rank correction and the unit-diagonal multipliers.
      std::vector<CMat> Y(static_cast<std::size_t>(q));
      for (int a = 0; a < q; ++a) Y[static_cast<std::size_t>(a)] = V * (*B[static_cast<std::size_t>(a)]) * V;
      const CMat YG = V * G * V;

      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(q + n, q + n);
      RVec rhs(q + n);
      for (int a = 0; a < q; ++a) {
        for (int b2 = a; b2 < q; ++b2) {
          const double v = re_trace_prod(*B[static_cast<std::size_t>(a)], Y[static_cast<std::size_t>(b2)]);
          S(a, b2) = v;
          S(b2, a) = v;
        }
        S(a, a) += mu / gamma[static_cast<std::size_t>(a)];
        for (int m = 0; m < n; ++m) {
          const double v = Y[static_cast<std::size_t>(a)](m, m).real();
          S(a, q + m) = v;
          S(q + m, a) = v;
        }
        rhs[a] = -re_trace_prod(*B[static_cast<std::size_t>(a)], YG);
      }
      for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) S(q + m, q + k) = std::norm(V(m, k));
        rhs[q + m] = -YG(m, m).real();
      }
      const RVec sol = S.ldlt().solve(rhs);

      CMat Corr = G;
      for (int a = 0; a < q; ++a) Corr += sol[a] * (*B[static_cast<std::size_t>(a)]);
      for (int m = 0; m < n; ++m) Corr(m, m) += sol[q + m];
      CMat E = (-1.0 / mu) * (V * Corr * V);
      E = 0.5 * (E + E.adjoint().eval());
      for (int m = 0; m < n; ++m) E(m, m) = 0.0;

      const double decrement = -re_trace_prod(G, E);
      if (!(decrement > 1e-12 * scale0)) break;

      bool ok0 = true;
      const double psi0 = barrier_value(V, lltV, mu, &ok0);
      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        CMat Vc = V + step * E;
        Eigen::LLT<CMat> lltc(Vc);
        if (lltc.info() == Eigen::Success) {
          bool ok = true;
          const double psi = barrier_value(Vc, lltc, mu, &ok);
          if (ok && psi <= psi0 - 0.25 * step * decrement) {
            V = std::move(Vc);
            lltV = std::move(lltc);
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (mu <= mu_min) break;
    mu = std::max(mu_min, mu * 0.12);
  }

  out.V = V;
  out.objective = objective(V);
  out.newton_steps = total_newton;
  out.barrier_gap = mu_min * (n + T + 1) * 2.0;
  out.status = SolveStatus::Optimal;
  (void)opt;
  return out;
}

}  // namespace hybridnet::convex
