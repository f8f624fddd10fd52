#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hybridnet/convex_backend.hpp"

namespace hybridnet::convex {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max-iter";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense two-phase tableau simplex with Bland's rule. Problems emitted by this
// repository have a handful of variables, so the full tableau is fine.
class Simplex {
 public:
  // minimize cost'z subject to M z = rhs, z >= 0. Columns marked artificial
  // may never re-enter the basis during phase 2.
  Simplex(Eigen::MatrixXd M, RVec rhs, std::vector<int> basis, int num_artificial)
      : T_(std::move(M)), rhs_(std::move(rhs)), basis_(std::move(basis)), num_art_(num_artificial) {}

  int cols() const { return static_cast<int>(T_.cols()); }
  int rows() const { return static_cast<int>(T_.rows()); }
  int first_artificial() const { return cols() - num_art_; }

  // Returns Optimal or Unbounded; iterates in-place.
  SolveStatus run(const RVec& cost, bool bar_artificials, int max_pivots, int* pivots_used) {
    for (int iter = 0; iter < max_pivots; ++iter) {
      RVec cb(rows());
      for (int i = 0; i < rows(); ++i) cb[i] = cost[basis_[i]];
      int enter = -1;
      for (int j = 0; j < cols(); ++j) {
        if (bar_artificials && j >= first_artificial()) continue;
        if (is_basic(j)) continue;
        const double reduced = cost[j] - cb.dot(T_.col(j));
        if (reduced < -1e-11) {
          enter = j;  // Bland: smallest index
          break;
        }
      }
      if (enter < 0) {
        if (pivots_used) *pivots_used = iter;
        return SolveStatus::Optimal;
      }
      int leave = -1;
      double best_ratio = kInf;
      for (int i = 0; i < rows(); ++i) {
        const double a = T_(i, enter);
        if (a > 1e-11) {
          const double ratio = rhs_[i] / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave < 0 || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        if (pivots_used) *pivots_used = iter;
        return SolveStatus::Unbounded;
      }
      pivot(leave, enter);
    }
    if (pivots_used) *pivots_used = max_pivots;
    return SolveStatus::MaxIter;
  }

  // Drive a basic artificial out of row r if any structural pivot exists.
  void expel_artificials() {
    for (int i = 0; i < rows(); ++i) {
      if (basis_[i] < first_artificial()) continue;
      for (int j = 0; j < first_artificial(); ++j) {
        if (!is_basic(j) && std::fabs(T_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  RVec primal(int num_structural) const {
    RVec z = RVec::Zero(cols());
    for (int i = 0; i < rows(); ++i) z[basis_[i]] = rhs_[i];
    return z.head(num_structural);
  }

  double basic_value(int col) const {
    for (int i = 0; i < rows(); ++i)
      if (basis_[i] == col) return rhs_[i];
    return 0.0;
  }

  const std::vector<int>& basis() const { return basis_; }

 private:
  bool is_basic(int j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  void pivot(int r, int c) {
    const double piv = T_(r, c);
    T_.row(r) /= piv;
    rhs_[r] /= piv;
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = T_(i, c);
      if (f != 0.0) {
        T_.row(i) -= f * T_.row(r);
        rhs_[i] -= f * rhs_[r];
      }
    }
    basis_[r] = c;
  }

  Eigen::MatrixXd T_;
  RVec rhs_;
  std::vector<int> basis_;
  int num_art_;
};

}  // namespace

BackendSolution solve(const LinearProgram& lp, const SolveOptions& opt) {
  BackendSolution out;
  const int n = static_cast<int>(lp.c.size());
  const int m_rows = static_cast<int>(lp.A.rows());

  // Shift to y = x - lower >= 0; collect inequality rows plus finite upper
  // bounds as explicit rows. Costs and rows are normalized so the pivot
  // thresholds are scale free.
  RVec lower = lp.lower.size() ? lp.lower : RVec::Zero(n);
  RVec upper = lp.upper.size() ? lp.upper : RVec::Constant(n, kInf);
  for (int k = 0; k < n; ++k)
    if (!std::isfinite(lower[k]))
      throw std::invalid_argument("LinearProgram: finite lower bounds required");

  const double cost_scale = std::max(lp.c.cwiseAbs().maxCoeff(), 1e-300);

  std::vector<RVec> rows;
  std::vector<double> rhs;
  std::vector<std::string> names;
  for (int i = 0; i < m_rows; ++i) {
    const double row_scale = std::max(lp.A.row(i).cwiseAbs().maxCoeff(), 1e-300);
    rows.push_back(lp.A.row(i).transpose() / row_scale);
    rhs.push_back((lp.b[i] - lp.A.row(i).dot(lower)) / row_scale);
    names.push_back(i < static_cast<int>(lp.row_names.size()) ? lp.row_names[i]
                                                              : "row " + std::to_string(i));
  }
  for (int k = 0; k < n; ++k) {
    if (std::isfinite(upper[k])) {
      RVec e = RVec::Zero(n);
      e[k] = 1.0;
      rows.push_back(e);
      rhs.push_back(upper[k] - lower[k]);
      names.push_back("upper bound " + std::to_string(k));
    }
  }
  const int m = static_cast<int>(rows.size());

  // Standard form: [rows | slacks | artificials] with nonnegative rhs.
  int num_art = 0;
  for (int i = 0; i < m; ++i)
    if (rhs[i] < 0) ++num_art;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, n + m + num_art);
  RVec beq(m);
  std::vector<int> basis(m);
  int art = 0;
  for (int i = 0; i < m; ++i) {
    double sign = rhs[i] < 0 ? -1.0 : 1.0;
    M.row(i).head(n) = sign * rows[i].transpose();
    M(i, n + i) = sign;  // slack becomes -1 when the row was flipped
    beq[i] = sign * rhs[i];
    if (sign < 0) {
      M(i, n + m + art) = 1.0;
      basis[i] = n + m + art;
      ++art;
    } else {
      basis[i] = n + i;
    }
  }

  Simplex sx(M, beq, basis, num_art);
  int pivots = 0;
  if (num_art > 0) {
    RVec phase1 = RVec::Zero(n + m + num_art);
    phase1.tail(num_art).setOnes();
    const SolveStatus st = sx.run(phase1, false, opt.max_iters * 50, &pivots);
    double infeas = 0.0;
    for (int j = n + m; j < n + m + num_art; ++j) infeas += sx.basic_value(j);
    if (st != SolveStatus::Optimal || infeas > 1e-8 * (1.0 + beq.cwiseAbs().maxCoeff())) {
      out.status = SolveStatus::Infeasible;
      out.primal_residual = infeas;
      // Name the most violated row at the least-infeasible point found.
      const RVec x_try = sx.primal(n) + lower;
      int worst = -1;
      double worst_violation = 1e-10;
      for (int i = 0; i < m; ++i) {
        const double v = rows[static_cast<std::size_t>(i)].dot(x_try - lower) - rhs[static_cast<std::size_t>(i)];
        if (v > worst_violation) {
          worst_violation = v;
          worst = i;
        }
      }
      out.x = x_try;
      out.message = worst >= 0 ? "infeasible: cannot satisfy " + names[static_cast<std::size_t>(worst)]
                               : "infeasible";
      return out;
    }
    sx.expel_artificials();
  }

  RVec phase2 = RVec::Zero(n + m + num_art);
  phase2.head(n) = -lp.c / cost_scale;
  const SolveStatus st = sx.run(phase2, true, opt.max_iters * 50, &pivots);
  out.iterations = pivots;
  if (st == SolveStatus::Unbounded) {
    out.status = SolveStatus::Unbounded;
    out.message = "objective unbounded above";
    return out;
  }
  if (st != SolveStatus::Optimal) {
    out.status = SolveStatus::MaxIter;
    return out;
  }

  out.x = sx.primal(n) + lower;
  out.objective = lp.c.dot(out.x);
  double res = 0.0;
  for (int i = 0; i < m_rows; ++i) res = std::max(res, lp.A.row(i).dot(out.x) - lp.b[i]);
  for (int k = 0; k < n; ++k) {
    res = std::max(res, lower[k] - out.x[k]);
    if (std::isfinite(upper[k])) res = std::max(res, out.x[k] - upper[k]);
  }
  out.primal_residual = std::max(0.0, res);
  out.status = SolveStatus::Optimal;
  return out;
}

}  // namespace hybridnet::convex
