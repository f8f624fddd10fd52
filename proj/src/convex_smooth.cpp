#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hybridnet/convex_backend.hpp"

namespace hybridnet::convex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double row_value(const SmoothRow& row, const RVec& x) {
  double v = row.q.size() ? row.q.dot(x) : 0.0;
  if (row.Q.size()) v += 0.5 * x.dot(row.Q * x);
  if (row.s.size())
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (row.s[k] != 0.0) v += row.s[k] * std::sqrt(std::max(x[k], 0.0));
  return v + row.r;
}

void row_grad_hess(const SmoothRow& row, const RVec& x, RVec& grad, Eigen::MatrixXd& hess) {
  grad = row.q.size() ? row.q : RVec::Zero(x.size());
  hess = Eigen::MatrixXd::Zero(x.size(), x.size());
  if (row.Q.size()) {
    grad += row.Q * x;
    hess += row.Q;
  }
  if (row.s.size()) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (row.s[k] != 0.0) {
        const double sq = std::sqrt(std::max(x[k], 1e-300));
        grad[k] += row.s[k] / (2.0 * sq);
        hess(k, k) += -row.s[k] / (4.0 * sq * sq * sq);  // s <= 0 keeps this PSD
      }
    }
  }
}

double objective_value(const SmoothProgram& sp, const RVec& x) {
  double f = sp.c.size() ? sp.c.dot(x) : 0.0;
  if (sp.Q.size()) f += 0.5 * x.dot(sp.Q * x);
  for (const auto& lt : sp.logs) f += lt.w * std::log(lt.a.dot(x) + lt.b);
  return f;
}

bool strictly_feasible(const SmoothProgram& sp, const RVec& x, double margin) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (sp.lower.size() && std::isfinite(sp.lower[k]) && !(x[k] > sp.lower[k])) return false;
    if (sp.upper.size() && std::isfinite(sp.upper[k]) && !(x[k] < sp.upper[k])) return false;
  }
  for (const auto& lt : sp.logs)
    if (!(lt.a.dot(x) + lt.b > 0.0)) return false;
  for (const auto& row : sp.rows)
    if (!(row_value(row, x) < -margin)) return false;
  return true;
}

struct BarrierResult {
  RVec x;
  double objective = 0.0;
  int newton_steps = 0;
  bool converged = false;
};

// Damped-Newton log-barrier pass from a strictly feasible start.
BarrierResult barrier_minimize(const SmoothProgram& sp, RVec x, double mu_min) {
  const int d = sp.dim;
  BarrierResult res;
  double mu = 0.1 * std::max(1.0, std::fabs(objective_value(sp, x)));

  auto phi = [&](const RVec& z, double mu_now) -> double {
    double val = -objective_value(sp, z);
    for (const auto& row : sp.rows) {
      const double g = row_value(row, z);
      if (!(g < 0)) return kInf;
      val -= mu_now * std::log(-g);
    }
    for (int k = 0; k < d; ++k) {
      if (sp.lower.size() && std::isfinite(sp.lower[k])) {
        if (!(z[k] > sp.lower[k])) return kInf;
        val -= mu_now * std::log(z[k] - sp.lower[k]);
      }
      if (sp.upper.size() && std::isfinite(sp.upper[k])) {
        if (!(z[k] < sp.upper[k])) return kInf;
        val -= mu_now * std::log(sp.upper[k] - z[k]);
      }
    }
    for (const auto& lt : sp.logs)
      if (!(lt.a.dot(z) + lt.b > 0)) return kInf;
    return val;
  };

  while (true) {
    for (int it = 0; it < 80; ++it) {
      RVec grad = RVec::Zero(d);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);

      if (sp.c.size()) grad -= sp.c;
      if (sp.Q.size()) {
        grad -= sp.Q * x;
        hess -= sp.Q;
      }
      for (const auto& lt : sp.logs) {
        const double den = lt.a.dot(x) + lt.b;
        grad -= (lt.w / den) * lt.a;
        hess += (lt.w / (den * den)) * (lt.a * lt.a.transpose());
      }
      RVec rg;
      Eigen::MatrixXd rh;
      for (const auto& row : sp.rows) {
        const double g = row_value(row, x);
        row_grad_hess(row, x, rg, rh);
        grad += (mu / -g) * rg;
        hess += mu * ((rg * rg.transpose()) / (g * g) + rh / -g);
      }
      for (int k = 0; k < d; ++k) {
        if (sp.lower.size() && std::isfinite(sp.lower[k])) {
          const double t = x[k] - sp.lower[k];
          grad[k] -= mu / t;
          hess(k, k) += mu / (t * t);
        }
        if (sp.upper.size() && std::isfinite(sp.upper[k])) {
          const double t = sp.upper[k] - x[k];
          grad[k] += mu / t;
          hess(k, k) += mu / (t * t);
        }
      }
      hess.diagonal().array() += 1e-13 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());

      const RVec step = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-12 * (1.0 + std::fabs(objective_value(sp, x))) )) break;

      const double phi0 = phi(x, mu);
      double t = 1.0;
      int bt = 0;
      while (bt++ < 60) {
        const RVec cand = x + t * step;
        const double pv = phi(cand, mu);
        if (pv < phi0 - 0.25 * t * decrement) {
          x = cand;
          break;
        }
        t *= 0.5;
      }
      ++res.newton_steps;
      if (bt > 60) break;
    }
    if (mu <= mu_min) break;
    mu = std::max(mu_min, mu * 0.12);
  }

  res.x = x;
  res.objective = objective_value(sp, x);
  res.converged = true;
  return res;
}

// Phase 1: minimize a shared slack above every constraint row.
bool find_strictly_feasible(const SmoothProgram& sp, RVec& x_out) {
  const int d = sp.dim;
  RVec x0(d);
  for (int k = 0; k < d; ++k) {
    const double lo = sp.lower.size() ? sp.lower[k] : -kInf;
    const double hi = sp.upper.size() ? sp.upper[k] : kInf;
    if (std::isfinite(lo) && std::isfinite(hi))
      x0[k] = 0.5 * (lo + hi);
    else if (std::isfinite(lo))
      x0[k] = lo + 1.0;
    else if (std::isfinite(hi))
      x0[k] = hi - 1.0;
    else
      x0[k] = 0.0;
  }
  if (strictly_feasible(sp, x0, 0.0)) {
    x_out = x0;
    return true;
  }

  SmoothProgram aux;
  aux.dim = d + 1;
  aux.c = RVec::Zero(d + 1);
  aux.c[d] = -1.0;  // maximize -tau
  aux.lower = RVec::Constant(d + 1, -kInf);
  aux.upper = RVec::Constant(d + 1, kInf);
  if (sp.lower.size()) aux.lower.head(d) = sp.lower;
  if (sp.upper.size()) aux.upper.head(d) = sp.upper;
  double tau0 = 0.0;
  for (const auto& row : sp.rows) {
    SmoothRow r2 = row;
    RVec q2 = RVec::Zero(d + 1);
    if (row.q.size()) q2.head(d) = row.q;
    q2[d] = -1.0;
    r2.q = q2;
    if (row.Q.size()) {
      Eigen::MatrixXd Q2 = Eigen::MatrixXd::Zero(d + 1, d + 1);
      Q2.topLeftCorner(d, d) = row.Q;
      r2.Q = Q2;
    }
    if (row.s.size()) {
      RVec s2 = RVec::Zero(d + 1);
      s2.head(d) = row.s;
      r2.s = s2;
    }
    aux.rows.push_back(std::move(r2));
    tau0 = std::max(tau0, row_value(row, x0));
  }
  RVec z0(d + 1);
  z0.head(d) = x0;
  z0[d] = tau0 + 1.0;

  const BarrierResult res = barrier_minimize(aux, z0, 1e-9);
  if (res.x[d] < -1e-10) {
    x_out = res.x.head(d);
    return strictly_feasible(sp, x_out, 0.0);
  }
  return false;
}

}  // namespace

BackendSolution solve(const SmoothProgram& sp, const SolveOptions& opt) {
  BackendSolution out;
  RVec x;
  if (sp.x_init.size() == sp.dim && strictly_feasible(sp, sp.x_init, 0.0)) {
    x = sp.x_init;
  } else if (!find_strictly_feasible(sp, x)) {
    out.status = SolveStatus::Infeasible;
    out.message = "no strictly feasible point found";
    return out;
  }

  const double mu_min = std::min(1e-10 * std::max(1.0, std::fabs(objective_value(sp, x))), 1e-9);
  const BarrierResult res = barrier_minimize(sp, x, mu_min);
  out.x = res.x;
  out.objective = res.objective;
  out.iterations = res.newton_steps;
  out.status = res.newton_steps < 80 * 40 ? SolveStatus::Optimal : SolveStatus::MaxIter;
  (void)opt;

  double residual = 0.0;
  for (const auto& row : sp.rows) residual = std::max(residual, row_value(row, res.x));
  for (int k = 0; k < sp.dim; ++k) {
    if (sp.lower.size() && std::isfinite(sp.lower[k])) residual = std::max(residual, sp.lower[k] - res.x[k]);
    if (sp.upper.size() && std::isfinite(sp.upper[k])) residual = std::max(residual, res.x[k] - sp.upper[k]);
  }
  out.primal_residual = std::max(0.0, residual);
  return out;
}

BackendSolution solve(const ConvexProblem& problem, const SolveOptions& opt) {
  return std::visit([&](const auto& p) { return solve(p, opt); }, problem);
}

namespace {

BackendSolution lp_vertex_enumeration(const LinearProgram& lp, double feas_tol) {
  const int n = static_cast<int>(lp.c.size());
  if (n > 3) throw std::invalid_argument("brute_force_oracle: more than 3 free dimensions");

  std::vector<RVec> planes;
  std::vector<double> rhs;
  for (int i = 0; i < lp.A.rows(); ++i) {
    planes.push_back(lp.A.row(i).transpose());
    rhs.push_back(lp.b[i]);
  }
  for (int k = 0; k < n; ++k) {
    RVec e = RVec::Zero(n);
    e[k] = 1.0;
    if (lp.upper.size() && std::isfinite(lp.upper[k])) {
      planes.push_back(e);
      rhs.push_back(lp.upper[k]);
    }
    planes.push_back(-e);
    rhs.push_back(lp.lower.size() ? -lp.lower[k] : 0.0);
  }
  const int P = static_cast<int>(planes.size());

  BackendSolution best;
  best.status = SolveStatus::Infeasible;
  best.objective = -kInf;
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd M(n, n);
      RVec r(n);
      for (int k = 0; k < n; ++k) {
        M.row(k) = planes[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])].transpose();
        r[k] = rhs[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (!lu.isInvertible()) return;
      const RVec x = lu.solve(r);
      for (int i = 0; i < P; ++i)
        if (planes[static_cast<std::size_t>(i)].dot(x) > rhs[static_cast<std::size_t>(i)] + feas_tol) return;
      const double obj = lp.c.dot(x);
      if (obj > best.objective) {
        best.objective = obj;
        best.x = x;
        best.status = SolveStatus::Optimal;
      }
      return;
    }
    for (int i = start; i < P; ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

BackendSolution smooth_grid_search(const SmoothProgram& sp, double step) {
  const int d = sp.dim;
  if (d > 3) throw std::invalid_argument("brute_force_oracle: more than 3 free dimensions");
  std::vector<int> counts(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    const double lo = sp.lower[k], hi = sp.upper[k];
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("brute_force_oracle: grid needs finite bounds");
    counts[static_cast<std::size_t>(k)] = std::max(1, static_cast<int>(std::floor((hi - lo) / step)) + 1);
    total *= static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
    if (total > 400000000ULL) throw std::invalid_argument("brute_force_oracle: grid too large");
  }

  BackendSolution best;
  best.status = SolveStatus::Infeasible;
  best.objective = -kInf;
  RVec x(d);
  std::vector<int> ix(static_cast<std::size_t>(d), 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    for (int k = 0; k < d; ++k) {
      ix[static_cast<std::size_t>(k)] = static_cast<int>(rem % static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]));
      rem /= static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
      x[k] = std::min(sp.lower[k] + step * ix[static_cast<std::size_t>(k)], sp.upper[k]);
    }
    bool ok = true;
    for (const auto& row : sp.rows)
      if (row_value(row, x) > 1e-12) {
        ok = false;
        break;
      }
    if (!ok) continue;
    bool logs_ok = true;
    for (const auto& lt : sp.logs)
      if (!(lt.a.dot(x) + lt.b > 0)) {
        logs_ok = false;
        break;
      }
    if (!logs_ok) continue;
    const double obj = objective_value(sp, x);
    if (obj > best.objective) {
      best.objective = obj;
      best.x = x;
      best.status = SolveStatus::Optimal;
    }
  }
  return best;
}

}  // namespace

BackendSolution brute_force_oracle(const ConvexProblem& problem, double grid_resolution) {
  if (std::holds_alternative<LinearProgram>(problem))
    return lp_vertex_enumeration(std::get<LinearProgram>(problem), std::max(grid_resolution, 1e-9));
  return smooth_grid_search(std::get<SmoothProgram>(problem), grid_resolution);
}

std::string dump(const ConvexProblem& problem) {
  std::ostringstream os;
  os.precision(17);
  if (std::holds_alternative<LinearProgram>(problem)) {
    const auto& lp = std::get<LinearProgram>(problem);
    os << "linear program, dim " << lp.c.size() << "\nmaximize " << lp.c.transpose() << "\n";
    for (int i = 0; i < lp.A.rows(); ++i)
      os << "  " << lp.A.row(i) << " <= " << lp.b[i]
         << (i < static_cast<int>(lp.row_names.size()) ? "   # " + lp.row_names[static_cast<std::size_t>(i)] : "")
         << "\n";
    if (lp.lower.size()) os << "  lower " << lp.lower.transpose() << "\n";
    if (lp.upper.size()) os << "  upper " << lp.upper.transpose() << "\n";
    return os.str();
  }
  const auto& sp = std::get<SmoothProgram>(problem);
  os << "smooth concave program, dim " << sp.dim << "\n";
  for (const auto& lt : sp.logs)
    os << "  + " << lt.w << " * ln(" << lt.a.transpose() << " . x + " << lt.b << ")\n";
  if (sp.c.size()) os << "  + " << sp.c.transpose() << " . x\n";
  if (sp.Q.size()) os << "  + x'Qx/2 with Q =\n" << sp.Q << "\n";
  for (const auto& row : sp.rows) {
    const RVec q = row.q.size() ? row.q : RVec::Zero(sp.dim);
    os << "  row " << row.name << ": " << q.transpose() << " . x";
    if (row.Q.size()) os << " + quad";
    if (row.s.size()) os << " + sqrt terms " << row.s.transpose();
    os << " + " << row.r << " <= 0\n";
  }
  if (sp.lower.size()) os << "  lower " << sp.lower.transpose() << "\n";
  if (sp.upper.size()) os << "  upper " << sp.upper.transpose() << "\n";
  return os.str();
}

}  // namespace hybridnet::convex
