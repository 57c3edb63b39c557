#include "frechet/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "frechet/error.hpp"
#include "frechet/lp.hpp"
#include "frechet/parallel.hpp"

namespace frechet {
namespace {

// l(u) and the upper triangle of Q: <Qu,u>/2 = sum_i Q_ii u_i^2 / 2 + sum_{i<j} Q_ij u_i u_j.
Eigen::VectorXd features(const Eigen::VectorXd& u) {
  const Eigen::Index d = u.size();
  Eigen::VectorXd phi(d + d * (d + 1) / 2);
  phi.head(d) = u;
  Eigen::Index k = d;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) phi[k++] = i == j ? 0.5 * u[i] * u[i] : u[i] * u[j];
  return phi;
}

std::vector<Eigen::VectorXd> fitting_sample(const ManifoldModel& m, const Point& q, double r,
                                            int size) {
  const int d = m.dim();
  const int n_rad = d == 1 ? size / 2 : 40;
  const int n_dir = std::max(2 * d, size / n_rad);
  const auto dirs = probe_directions(m, q, n_dir);
  const int half = n_rad / 2;
  std::vector<double> radii;
  for (int k = 0; k < half; ++k) radii.push_back(r * std::pow(1e-3, double(k) / std::max(1, half - 1)));
  for (int k = 0; k < n_rad - half; ++k) radii.push_back(r * (k + 1) / (n_rad - half));
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : dirs)
    for (double s : radii) out.push_back(s * v.components);
  return out;
}

std::vector<Eigen::VectorXd> validation_sample(const ManifoldModel& m, const Point& q, double r,
                                               int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < size; ++k) {
    const TangentVector v = m.random_unit_tangent(q, rng);
    out.push_back(r * std::pow(unif(rng), 1.0 / m.dim()) * v.components);
  }
  return out;
}

std::vector<double> increments(const ScalarField& f, const Point& q, double fq,
                               const std::vector<Eigen::VectorXd>& us) {
  std::vector<double> g(us.size());
  parallel_for(us.size(), [&](std::size_t k) { g[k] = f(f.manifold.exp(f.manifold.tangent(q, us[k]))) - fq; });
  return g;
}

}  // namespace

void BarrierParams::validate(int dim) const {
  require(sample_size >= 100 * dim, ErrorCode::InvalidInput, "barrier sample size must be >= 100 * dim");
  require(validation_size >= 0 && refine_rounds >= 0, ErrorCode::InvalidInput,
          "validation size and refine rounds must be >= 0");
  require(slack >= 0.0 && bound > 0.0, ErrorCode::InvalidInput, "bad barrier slack or bound");
}

double barrier_value(const BarrierCertificate& cert, const Eigen::VectorXd& u) {
  return cert.center_value + cert.linear.dot(u) + 0.5 * u.dot(cert.quadratic * u);
}

BarrierCertificate barrier_certificate_search(const ScalarField& f, const Point& q, double target,
                                              double radius, const BarrierParams& params) {
  const auto& m = f.manifold;
  m.check(q);
  params.validate(m.dim());
  require(radius > 0.0 && radius < m.injectivity_radius(), ErrorCode::InvalidInput,
          "barrier radius must lie in (0, injectivity radius)");
  const int d = m.dim();
  const double fq = f(q);

  std::vector<Eigen::VectorXd> fit = fitting_sample(m, q, radius, params.sample_size);
  std::vector<double> g_fit = increments(f, q, fq, fit);
  const std::vector<Eigen::VectorXd> val = validation_sample(m, q, radius, params.validation_size, params.seed);
  const std::vector<double> g_val = increments(f, q, fq, val);

  const Eigen::Index nvar = d + d * (d + 1) / 2;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
  for (Eigen::Index i = 0, k = d; i < d; ++i) {
    c[k] = 1.0;
    k += d - i;
  }

  BarrierCertificate cert;
  cert.center = q;
  cert.radius = radius;
  cert.target = target;
  cert.center_value = fq;
  for (int round = 0;; ++round) {
    Eigen::MatrixXd A(fit.size(), nvar);
    Eigen::VectorXd b(fit.size());
    for (std::size_t k = 0; k < fit.size(); ++k) {
      const double s = fit[k].norm();
      A.row(k) = features(fit[k]).transpose() / s;
      b[k] = (g_fit[k] + params.slack * s * s) / s;
    }
    const LpSolution sol = solve_lp(A, b, c, params.bound);
    cert.linear = sol.x.head(d);
    cert.quadratic = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0, k = d; i < d; ++i)
      for (Eigen::Index j = i; j < d; ++j, ++k) cert.quadratic(i, j) = cert.quadratic(j, i) = sol.x[k];
    cert.trace = cert.quadratic.trace();

    std::vector<std::pair<double, std::size_t>> violations;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fit.size(); ++k)
      margin = std::min(margin, barrier_value(cert, fit[k]) - fq - g_fit[k]);
    for (std::size_t k = 0; k < val.size(); ++k) {
      const double gap = barrier_value(cert, val[k]) - fq - g_val[k];
      margin = std::min(margin, gap);
      if (gap < -kMarginTol) violations.emplace_back(gap, k);
    }
    cert.margin = margin;
    cert.sample_size = fit.size() + val.size();
    if (violations.empty() || round >= params.refine_rounds) break;
    std::sort(violations.begin(), violations.end());
    for (std::size_t k = 0; k < violations.size() && k < 500; ++k) {
      fit.push_back(val[violations[k].second]);
      g_fit.push_back(g_val[violations[k].second]);
    }
  }
  cert.success = cert.trace < target && cert.margin >= -kMarginTol;
  return cert;
}

std::vector<double> radius_schedule(double r_max, int count) {
  require(r_max > 0.0 && count >= 1, ErrorCode::InvalidInput, "bad radius schedule");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(std::ldexp(r_max, -k));
  return out;
}

BarrierProfile barrier_divergence_profile(const ScalarField& f, const Point& q,
                                          const std::vector<double>& targets,
                                          const std::vector<double>& radii,
                                          const BarrierParams& params) {
  require(!targets.empty() && !radii.empty(), ErrorCode::InvalidInput,
          "profile needs targets and radii");
  for (std::size_t k = 1; k < targets.size(); ++k)
    require(targets[k] < targets[k - 1], ErrorCode::InvalidInput, "targets must be decreasing");
  for (std::size_t k = 1; k < radii.size(); ++k)
    require(radii[k] < radii[k - 1], ErrorCode::InvalidInput, "radii must be decreasing");

  BarrierProfile out;
  for (double r : radii)
    out.envelopes.push_back(barrier_certificate_search(f, q, std::numeric_limits<double>::infinity(), r, params));
  out.minus_infinity_evidence = true;
  for (double C : targets) {
    ProfileRow row{C, 0.0, out.envelopes.back().trace, false};
    for (const auto& e : out.envelopes) {
      if (e.trace < C && e.margin >= -kMarginTol) {
        row = {C, e.radius, e.trace, true};
        break;
      }
    }
    out.minus_infinity_evidence = out.minus_infinity_evidence && row.success;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace frechet
