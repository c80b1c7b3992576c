#include "smamicro/lp_simplex.hpp"

#include <algorithm>
#include <stdexcept>

namespace smamicro {

LpSolution solve_lp_slack_feasible(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& b, int max_pivots) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (c.size() != n || b.size() != m) throw std::invalid_argument("LP dimension mismatch");
  if ((b.array() < 0.0).any()) throw std::invalid_argument("LP right-hand side must be >= 0");

  constexpr double kPivotTol = 1e-12;
  constexpr double kCostTol = 1e-12;

  // Columns: [x (n) | slack (m) | rhs].
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m, n + m + 1);
  tab.leftCols(n) = a;
  tab.block(0, n, m, m).setIdentity();
  tab.col(n + m) = b;
  Eigen::VectorXd reduced = Eigen::VectorXd::Zero(n + m);
  reduced.head(n) = c;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  LpSolution sol;
  while (true) {
    Eigen::Index entering = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (reduced[j] < -kCostTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) {
      sol.status = LpStatus::optimal;
      break;
    }
    if (sol.pivots >= max_pivots) {
      sol.status = LpStatus::iteration_limit;
      break;
    }

    Eigen::Index leaving = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double coef = tab(i, entering);
      if (coef <= kPivotTol) continue;
      const double ratio = tab(i, n + m) / coef;
      if (leaving < 0 || ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 && basis[i] < basis[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    if (leaving < 0) {
      sol.status = LpStatus::unbounded;
      break;
    }

    const double pivot = tab(leaving, entering);
    tab.row(leaving) /= pivot;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leaving) continue;
      const double f = tab(i, entering);
      if (f != 0.0) tab.row(i) -= f * tab.row(leaving);
    }
    const double f = reduced[entering];
    reduced -= f * tab.row(leaving).head(n + m).transpose();
    basis[leaving] = entering;
    ++sol.pivots;
  }

  sol.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = tab(i, n + m);
  }
  sol.objective = c.dot(sol.x);

  // Simplex multipliers: reduced cost of slack i is -y_i.
  sol.dual = -reduced.tail(m);
  sol.dual_objective = b.dot(sol.dual);
  const Eigen::VectorXd slack_in_dual = a.transpose() * sol.dual - c;
  double infeas = 0.0;
  if (n > 0) infeas = std::max(infeas, slack_in_dual.maxCoeff());
  if (m > 0) infeas = std::max(infeas, sol.dual.maxCoeff());
  sol.dual_infeasibility = infeas;
  return sol;
}

}  // namespace smamicro
