#include "frechet/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "frechet/error.hpp"

namespace frechet {
namespace {

bool coords_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

bool coords_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

double pow_p(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 1.0) return d;
  return std::pow(d, p);
}

}  // namespace

AtomMeasure make_measure(const ManifoldModel& m, std::vector<Point> atoms,
                         std::vector<double> weights) {
  require(!atoms.empty(), ErrorCode::InvalidInput, "measure needs at least one atom");
  require(atoms.size() == weights.size(), ErrorCode::InvalidInput,
          "atoms and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidInput,
            "weights must be finite and nonnegative");
    total += w;
  }
  require(total > 0.0, ErrorCode::InvalidInput, "weights must have positive sum");
  // Already normalized up to summation roundoff: keep the weights bit-exact.
  if (std::abs(total - 1.0) <= weights.size() * std::numeric_limits<double>::epsilon()) total = 1.0;
  for (auto& a : atoms) a = m.point(a.coords);

  // Merge coincident atoms, keeping first-occurrence order.
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coords_less(atoms[a].coords, atoms[b].coords);
  });
  std::vector<std::size_t> owner(atoms.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t first = order[k], j = k;
    for (; j < order.size() && coords_equal(atoms[order[j]].coords, atoms[order[k]].coords); ++j)
      first = std::min(first, order[j]);
    for (std::size_t t = k; t < j; ++t) owner[order[t]] = first;
    k = j;
  }
  std::vector<double> merged(atoms.size(), 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) merged[owner[i]] += weights[i];

  std::vector<Point> out_atoms;
  std::vector<double> out_weights;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (owner[i] != i || merged[i] == 0.0) continue;
    out_atoms.push_back(std::move(atoms[i]));
    out_weights.push_back(merged[i] / total);
  }
  return AtomMeasure(m, std::move(out_atoms), std::move(out_weights));
}

AtomMeasure dyadic_dirac_measure(const ManifoldModel& m, int count) {
  require(count >= 1, ErrorCode::InvalidInput, "dyadic measure needs J >= 1");
  require(count <= 1000, ErrorCode::InvalidInput, "dyadic measure J too large");
  std::vector<double> w(count);
  for (int j = 0; j < count; ++j) w[j] = std::ldexp(1.0, -(j + 1));
  return make_measure(m, m.dense_sequence(count), std::move(w));
}

AtomMeasure equator_lattice(const ManifoldModel& sphere, int n) {
  require(sphere.kind() == ManifoldKind::Sphere && sphere.dim() >= 2, ErrorCode::InvalidInput,
          "equator lattice needs a sphere of dimension >= 2");
  require(n >= 1, ErrorCode::InvalidInput, "equator lattice needs n >= 1");
  std::vector<Point> atoms;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(sphere.coord_dim());
    x[0] = std::cos(phi);
    x[1] = std::sin(phi);
    atoms.push_back(sphere.point(x));
  }
  return make_measure(sphere, std::move(atoms), std::vector<double>(n, 1.0));
}

AtomMeasure sample_measure(const SamplerSpec& spec, const ManifoldModel& m) {
  require(spec.count >= 1, ErrorCode::InvalidInput, "sampler count must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss;
  std::vector<Point> atoms;
  atoms.reserve(spec.count);

  switch (spec.kind) {
    case SamplerKind::UniformGrid:
      for (int i = 0; i < spec.count; ++i) atoms.push_back(m.random_point(rng));
      break;

    case SamplerKind::UniformSubmanifold: {
      const bool ok = (m.kind() == ManifoldKind::Sphere && m.dim() >= 2) ||
                      (m.kind() == ManifoldKind::FlatTorus && m.dim() >= 2);
      require(ok, ErrorCode::InvalidInput, "equator sampler unsupported on " + m.name());
      for (int i = 0; i < spec.count; ++i) {
        Eigen::VectorXd x;
        if (m.kind() == ManifoldKind::Sphere) {
          x = Eigen::VectorXd::Zero(m.coord_dim());
          do {
            for (int k = 0; k < m.dim(); ++k) x[k] = gauss(rng);
          } while (x.norm() < 1e-12);
        } else {
          x = m.random_point(rng).coords;
          x[m.dim() - 1] = 0.0;
        }
        atoms.push_back(m.point(x));
      }
      break;
    }

    case SamplerKind::WrappedGaussian: {
      require(std::isfinite(spec.sigma) && spec.sigma > 0.0, ErrorCode::InvalidInput,
              "sigma must be > 0");
      Point center;
      if (spec.center) {
        center = m.point(spec.center->coords);
      } else {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(m.coord_dim());
        if (m.kind() == ManifoldKind::Sphere) c[m.coord_dim() - 1] = 1.0;
        center = m.point(c);
      }
      for (int i = 0; i < spec.count; ++i) {
        Eigen::VectorXd v(m.dim());
        if (m.kind() == ManifoldKind::Sphere) {
          do {
            for (int k = 0; k < m.dim(); ++k) v[k] = spec.sigma * gauss(rng);
          } while (v.norm() > std::numbers::pi);
        } else {
          for (int k = 0; k < m.dim(); ++k) v[k] = spec.sigma * gauss(rng);
        }
        atoms.push_back(m.exp(m.tangent(center, v)));
      }
      break;
    }
  }
  return make_measure(m, std::move(atoms), std::vector<double>(spec.count, 1.0));
}

double moment(const AtomMeasure& mu, const Point& q, double p) {
  require(p >= 1.0, ErrorCode::InvalidInput, "moment exponent must be >= 1");
  const auto atoms = mu.atoms();
  const auto w = mu.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) s += w[i] * pow_p(mu.manifold().distance(q, atoms[i]), p);
  return s;
}

}  // namespace frechet
