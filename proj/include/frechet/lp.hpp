#pragma once

#include <Eigen/Dense>

namespace frechet {

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

/// min c^T x  subject to  A x >= b  and  |x_i| <= bound.
///
/// Solved through the dual  max b^T y + box terms  s.t.  A^T y +- e_i = c, y >= 0  with a revised
/// simplex (Dantzig pricing, Bland's rule after repeated degenerate pivots). The box columns give
/// a feasible starting basis, and the primal solution is read off the simplex multipliers.
/// Intended for few variables and many constraints.
LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                    double bound);

}  // namespace frechet
