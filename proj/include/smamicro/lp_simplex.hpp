#pragma once

#include <vector>

#include <Eigen/Core>

namespace smamicro {

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0.0;
  Eigen::VectorXd x;       ///< primal solution
  Eigen::VectorXd dual;    ///< multipliers of A x <= b (all <= 0 at optimum)
  double dual_objective = 0.0;
  double dual_infeasibility = 0.0;  ///< max violation of A^T y <= c, y <= 0
  int pivots = 0;
};

/// Dense tableau simplex for  min c^T x  s.t.  A x <= b, x >= 0  with b >= 0,
/// so the slack basis is feasible from the start. Bland's rule prevents
/// cycling on the degenerate rows. Meant for verification-sized problems.
LpSolution solve_lp_slack_feasible(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& b, int max_pivots = 200000);

}  // namespace smamicro
