#include "frechet/lp.hpp"

#include <cmath>
#include <vector>

#include "frechet/error.hpp"

namespace frechet {

LpSolution solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                    double bound) {
  const Eigen::Index n = c.size();
  const Eigen::Index m = A.rows();
  require(A.cols() == n && b.size() == m, ErrorCode::InvalidInput, "LP dimensions disagree");
  require(bound > 0.0, ErrorCode::InvalidInput, "LP box bound must be positive");

  // Dual columns: constraint rows first, then +e_i / -e_i for the box.
  auto column = [&](Eigen::Index j) -> Eigen::VectorXd {
    if (j < m) return A.row(j).transpose();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[(j - m) / 2] = ((j - m) % 2 == 0) ? 1.0 : -1.0;
    return e;
  };
  auto cost = [&](Eigen::Index j) { return j < m ? b[j] : -bound; };

  std::vector<Eigen::Index> basis(n);
  std::vector<char> in_basis(m + 2 * n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis[i] = m + 2 * i + (c[i] >= 0.0 ? 0 : 1);
    in_basis[basis[i]] = 1;
  }

  const int max_iterations = 50 * static_cast<int>(m + 2 * n) + 1000;
  bool bland = false;
  int degenerate = 0;
  Eigen::MatrixXd B(n, n);
  Eigen::VectorXd cb(n);
  for (int it = 0; it < max_iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      B.col(i) = column(basis[i]);
      cb[i] = cost(basis[i]);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd yb = lu.solve(c);
    const Eigen::VectorXd pi = B.transpose().fullPivLu().solve(cb);

    // Reduced costs of the maximization; positive means improving.
    const Eigen::VectorXd rc_rows = b - A * pi;
    Eigen::Index enter = -1;
    double best = 0.0;
    for (Eigen::Index j = 0; j < m + 2 * n; ++j) {
      if (in_basis[j]) continue;
      const double rc = j < m ? rc_rows[j] : -bound - (((j - m) % 2 == 0) ? pi[(j - m) / 2] : -pi[(j - m) / 2]);
      if (rc <= 1e-12 * (1.0 + std::abs(cost(j)))) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (rc > best) {
        best = rc;
        enter = j;
      }
    }
    if (enter < 0) return {pi, c.dot(pi), it};

    const Eigen::VectorXd dir = lu.solve(column(enter));
    Eigen::Index leave = -1;
    double ratio = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dir[i] <= 1e-12) continue;
      const double r = std::max(0.0, yb[i]) / dir[i];
      if (leave < 0 || r < ratio || (r == ratio && basis[i] < basis[leave])) {
        leave = i;
        ratio = r;
      }
    }
    require(leave >= 0, ErrorCode::Resource, "LP dual is unbounded (primal infeasible)");
    degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
    if (degenerate > 50) bland = true;
    in_basis[basis[leave]] = 0;
    basis[leave] = enter;
    in_basis[enter] = 1;
  }
  throw Error(ErrorCode::Resource, "LP iteration limit reached");
}

}  // namespace frechet
