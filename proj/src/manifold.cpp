#include "frechet/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "frechet/error.hpp"
#include "frechet/parallel.hpp"

namespace frechet {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// pi * (3 - sqrt(5))
const double kGoldenAngle = kPi * (3.0 - std::sqrt(5.0));
constexpr std::size_t kMaxGridPoints = 20'000'000;

// Reduces a into [0, period).
double wrap_period(double a, double period) {
  double r = std::fmod(a, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

// Radical inverse of j in the given base.
double radical_inverse(std::uint64_t j, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (j > 0) {
    r += f * static_cast<double>(j % base);
    j /= base;
    f *= inv;
  }
  return r;
}

unsigned nth_prime(int i) {
  static const unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                    41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
  if (i < 0 || i >= static_cast<int>(std::size(primes)))
    throw Error(ErrorCode::InvalidInput, "dimension too large for Halton sequence");
  return primes[i];
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

Point circle_point(double theta) { return Point{Eigen::VectorXd::Constant(1, wrap_angle(theta))}; }

Eigen::VectorXd unit_circle(double theta) {
  Eigen::VectorXd v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

// Fibonacci spiral with n points on S^2.
std::vector<Point> fibonacci_sphere(std::size_t n) {
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = static_cast<double>(i) * kGoldenAngle;
    Eigen::VectorXd x(3);
    x << rho * std::cos(phi), rho * std::sin(phi), z;
    pts.push_back(Point{x});
  }
  return pts;
}

// Normalized lattice on the boundary of [-1,1]^{n} (n = ambient dimension).
std::vector<Point> cube_sphere(int ambient, int resolution) {
  std::vector<Point> pts;
  std::vector<int> idx(ambient, 0);
  const double step = 2.0 / (resolution - 1);
  while (true) {
    bool on_face = false;
    Eigen::VectorXd x(ambient);
    for (int i = 0; i < ambient; ++i) {
      x[i] = -1.0 + step * idx[i];
      if (idx[i] == 0 || idx[i] == resolution - 1) on_face = true;
    }
    if (on_face) pts.push_back(Point{x.normalized()});
    int k = 0;
    while (k < ambient && ++idx[k] == resolution) idx[k++] = 0;
    if (k == ambient) break;
  }
  return pts;
}

double chord_to_arc(double chord) { return 2.0 * std::asin(std::min(1.0, chord / 2.0)); }

}  // namespace

double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

ManifoldModel::ManifoldModel(ManifoldKind kind, int dim, Eigen::VectorXd periods)
    : kind_(kind), dim_(dim), periods_(std::move(periods)) {}

ManifoldModel ManifoldModel::circle() {
  return ManifoldModel(ManifoldKind::Circle, 1, Eigen::VectorXd::Constant(1, kTwoPi));
}

ManifoldModel ManifoldModel::sphere(int dim) {
  require(dim >= 1, ErrorCode::InvalidInput, "sphere dimension must be >= 1");
  return ManifoldModel(ManifoldKind::Sphere, dim, Eigen::VectorXd());
}

ManifoldModel ManifoldModel::flat_torus(int dim) {
  require(dim >= 1, ErrorCode::InvalidInput, "torus dimension must be >= 1");
  return ManifoldModel(ManifoldKind::FlatTorus, dim, Eigen::VectorXd::Constant(dim, kTwoPi));
}

ManifoldModel ManifoldModel::flat_torus(const Eigen::VectorXd& periods) {
  require(periods.size() >= 1, ErrorCode::InvalidInput, "torus dimension must be >= 1");
  for (double p : periods)
    require(std::isfinite(p) && p > 0.0, ErrorCode::InvalidInput, "torus periods must be > 0");
  return ManifoldModel(ManifoldKind::FlatTorus, static_cast<int>(periods.size()), periods);
}

std::string ManifoldModel::name() const {
  switch (kind_) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Sphere: return "sphere(" + std::to_string(dim_) + ")";
    case ManifoldKind::FlatTorus: return "torus(" + std::to_string(dim_) + ")";
  }
  return "?";
}

bool ManifoldModel::operator==(const ManifoldModel& other) const {
  return kind_ == other.kind_ && dim_ == other.dim_ && periods_.size() == other.periods_.size() &&
         (periods_.size() == 0 || periods_ == other.periods_);
}

double ManifoldModel::injectivity_radius() const {
  if (kind_ == ManifoldKind::FlatTorus) return 0.5 * periods_.minCoeff();
  return kPi;
}

double ManifoldModel::diameter() const {
  if (kind_ == ManifoldKind::FlatTorus) return 0.5 * periods_.norm();
  return kPi;
}

void ManifoldModel::check(const Point& p) const {
  if (p.coords.size() != coord_dim())
    throw Error(ErrorCode::InvalidInput, "point has " + std::to_string(p.coords.size()) +
                                             " coordinates, " + name() + " expects " +
                                             std::to_string(coord_dim()));
}

Point ManifoldModel::point(const Eigen::VectorXd& coords) const {
  Point p{coords};
  check(p);
  require(p.coords.allFinite(), ErrorCode::InvalidInput, "point coordinates must be finite");
  switch (kind_) {
    case ManifoldKind::Circle: p.coords[0] = wrap_angle(p.coords[0]); break;
    case ManifoldKind::Sphere: {
      const double n = p.coords.norm();
      require(n > 0.0, ErrorCode::InvalidInput, "sphere point must be nonzero");
      // Leave unit vectors alone so canonicalization is idempotent.
      if (std::abs(n - 1.0) > 4 * std::numeric_limits<double>::epsilon()) p.coords /= n;
      break;
    }
    case ManifoldKind::FlatTorus:
      for (int i = 0; i < dim_; ++i) p.coords[i] = wrap_period(p.coords[i], periods_[i]);
      break;
  }
  return p;
}

Point ManifoldModel::point(std::initializer_list<double> coords) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v[i++] = c;
  return point(v);
}

TangentVector ManifoldModel::tangent(const Point& base, const Eigen::VectorXd& components) const {
  check(base);
  require(components.size() == dim_, ErrorCode::InvalidInput,
          "tangent components must have " + std::to_string(dim_) + " entries");
  return TangentVector{base, components};
}

TangentVector ManifoldModel::tangent(const Point& base,
                                     std::initializer_list<double> components) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(components.size()));
  Eigen::Index i = 0;
  for (double c : components) v[i++] = c;
  return tangent(base, v);
}

TangentVector ManifoldModel::zero_tangent(const Point& base) const {
  return tangent(base, Eigen::VectorXd::Zero(dim_));
}

Eigen::MatrixXd ManifoldModel::frame(const Point& q) const {
  check(q);
  if (kind_ != ManifoldKind::Sphere) return Eigen::MatrixXd::Identity(dim_, dim_);
  // S^1: counterclockwise unit tangent, so components match circle angles.
  if (dim_ == 1) return Eigen::Vector2d(-q.coords[1], q.coords[0]);
  // Householder reflection H with H e_n = -sign(q_n) q; its first n-1 columns span q^perp.
  const int n = dim_ + 1;
  const double s = q.coords[n - 1] >= 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd u = q.coords;
  u[n - 1] += s;
  const double uu = u.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / uu) * u * u.transpose();
  return h.leftCols(dim_);
}

Eigen::VectorXd ManifoldModel::embed(const TangentVector& v) const {
  if (kind_ != ManifoldKind::Sphere) return v.components;
  return frame(v.base) * v.components;
}

TangentVector ManifoldModel::from_ambient(const Point& base, const Eigen::VectorXd& ambient) const {
  check(base);
  if (kind_ != ManifoldKind::Sphere) return tangent(base, ambient);
  require(ambient.size() == coord_dim(), ErrorCode::InvalidInput, "ambient vector size mismatch");
  return TangentVector{base, frame(base).transpose() * ambient};
}

double ManifoldModel::distance(const Point& q, const Point& x) const {
  check(q);
  check(x);
  switch (kind_) {
    case ManifoldKind::Circle: return std::abs(wrap_angle(x.coords[0] - q.coords[0]));
    case ManifoldKind::Sphere:
      return 2.0 * std::atan2((x.coords - q.coords).norm(), (x.coords + q.coords).norm());
    case ManifoldKind::FlatTorus: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double u = std::remainder(x.coords[i] - q.coords[i], periods_[i]);
        s += u * u;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

Point ManifoldModel::exp(const TangentVector& v) const {
  check(v.base);
  require(v.components.size() == dim_, ErrorCode::InvalidInput, "tangent vector size mismatch");
  switch (kind_) {
    case ManifoldKind::Circle: return circle_point(v.base.coords[0] + v.components[0]);
    case ManifoldKind::Sphere: {
      const double theta = v.components.norm();
      if (theta == 0.0) return v.base;
      const Eigen::VectorXd dir = frame(v.base) * (v.components / theta);
      Eigen::VectorXd x = std::cos(theta) * v.base.coords + std::sin(theta) * dir;
      return Point{x.normalized()};
    }
    case ManifoldKind::FlatTorus: {
      Point p{v.base.coords + v.components};
      for (int i = 0; i < dim_; ++i) p.coords[i] = wrap_period(p.coords[i], periods_[i]);
      return p;
    }
  }
  return v.base;
}

LogSet ManifoldModel::log_set(const Point& q, const Point& x, double tol) const {
  check(q);
  check(x);
  require(tol >= 0.0, ErrorCode::InvalidInput, "tol must be >= 0");
  LogSet out;

  if (kind_ == ManifoldKind::Sphere) {
    const double d = distance(q, x);
    if (d == 0.0) {
      out.vectors.push_back(zero_tangent(q));
      return out;
    }
    if (kPi - d <= tol) {
      // Antipodal: every direction is minimizing. Sample the frame.
      for (int i = 0; i < dim_; ++i) {
        for (double sgn : {-1.0, 1.0}) {
          Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
          c[i] = sgn * d;
          out.vectors.push_back(TangentVector{q, c});
        }
      }
      std::sort(out.vectors.begin(), out.vectors.end(),
                [](const TangentVector& a, const TangentVector& b) {
                  return lex_less(a.components, b.components);
                });
      out.continuum = dim_ >= 2;
      return out;
    }
    Eigen::VectorXd w = x.coords - q.coords.dot(x.coords) * q.coords;
    const double wn = w.norm();
    Eigen::VectorXd c = frame(q).transpose() * w;
    // Re-project onto the frame; w is orthogonal to q up to roundoff.
    const double cn = c.norm();
    if (cn > 0.0 && wn > 0.0) c *= d / cn;
    out.vectors.push_back(TangentVector{q, c});
    return out;
  }

  // Circle and flat torus: enumerate lattice lifts of the wrapped difference with norm <= d + tol.
  const int n = dim_;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = std::remainder(x.coords[i] - q.coords[i], periods_[i]);
  const double d = u.norm();
  const double budget = (d + tol) * (d + tol) - d * d;
  std::vector<std::vector<double>> candidates(n);
  for (int i = 0; i < n; ++i) {
    for (double c : {u[i] - periods_[i], u[i], u[i] + periods_[i]}) {
      if (c * c <= u[i] * u[i] + budget) candidates[i].push_back(c);
    }
  }
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c[i] = candidates[i][idx[i]];
    if (c.norm() <= d + tol) out.vectors.push_back(TangentVector{q, c});
    int k = 0;
    while (k < n && ++idx[k] == candidates[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  std::sort(out.vectors.begin(), out.vectors.end(),
            [](const TangentVector& a, const TangentVector& b) {
              return lex_less(a.components, b.components);
            });
  return out;
}

TangentVector ManifoldModel::log(const Point& q, const Point& x, double tol) const {
  return log_set(q, x, tol).vectors.front();
}

double ManifoldModel::cut_locus_distance(const Point& q, const Point& x) const {
  if (kind_ != ManifoldKind::FlatTorus) return std::max(0.0, kPi - distance(q, x));
  check(q);
  check(x);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) {
    const double u = std::remainder(x.coords[i] - q.coords[i], periods_[i]);
    best = std::min(best, 0.5 * periods_[i] - std::abs(u));
  }
  return std::max(0.0, best);
}

bool ManifoldModel::in_cut_locus_plus(const Point& q, const Point& x, double tol) const {
  require(tol > 0.0, ErrorCode::InvalidInput, "tol must be > 0");
  return log_set(q, x, tol).multivalued();
}

Point ManifoldModel::antipode(const Point& q) const {
  check(q);
  switch (kind_) {
    case ManifoldKind::Circle: return circle_point(q.coords[0] + kPi);
    case ManifoldKind::Sphere: return Point{-q.coords};
    case ManifoldKind::FlatTorus: {
      Point p{q.coords + 0.5 * periods_};
      for (int i = 0; i < dim_; ++i) p.coords[i] = wrap_period(p.coords[i], periods_[i]);
      return p;
    }
  }
  return q;
}

Grid ManifoldModel::grid(int resolution) const {
  require(resolution >= 2, ErrorCode::InvalidInput, "grid resolution must be >= 2");
  Grid g;
  const double res = resolution;
  if (kind_ == ManifoldKind::Circle || (kind_ == ManifoldKind::Sphere && dim_ == 1)) {
    for (int k = 0; k < resolution; ++k) {
      const double theta = kTwoPi * k / res;
      g.points.push_back(kind_ == ManifoldKind::Circle ? circle_point(theta)
                                                       : Point{unit_circle(wrap_angle(theta))});
    }
    g.covering_radius = kPi / res;
    return g;
  }
  if (kind_ == ManifoldKind::FlatTorus) {
    const double count = std::pow(res, dim_);
    if (count > static_cast<double>(kMaxGridPoints))
      throw Error(ErrorCode::Resource, "grid of " + std::to_string(count) + " points exceeds budget");
    std::vector<int> idx(dim_, 0);
    while (true) {
      Eigen::VectorXd x(dim_);
      for (int i = 0; i < dim_; ++i) x[i] = periods_[i] * idx[i] / res;
      g.points.push_back(Point{x});
      int k = 0;
      while (k < dim_ && ++idx[k] == resolution) idx[k++] = 0;
      if (k == dim_) break;
    }
    g.covering_radius = (periods_ / (2.0 * res)).norm();
    return g;
  }
  // Sphere, dim >= 2.
  std::vector<Point> reference;
  if (dim_ == 2) {
    const double count = res * res;
    if (count * 9.0 > static_cast<double>(kMaxGridPoints))
      throw Error(ErrorCode::Resource, "grid of " + std::to_string(count) + " points exceeds budget");
    g.points = fibonacci_sphere(static_cast<std::size_t>(count));
    reference = fibonacci_sphere(std::max<std::size_t>(8 * count + 1, std::min<std::size_t>(64 * count + 1, 2'000'000)));
  } else {
    const double count = 2.0 * (dim_ + 1) * std::pow(res, dim_);
    if (count * 9.0 > static_cast<double>(kMaxGridPoints))
      throw Error(ErrorCode::Resource, "grid of " + std::to_string(count) + " points exceeds budget");
    g.points = cube_sphere(dim_ + 1, resolution);
    reference = cube_sphere(dim_ + 1, 3 * resolution - 1);
  }
  g.covering_radius = covering_radius(*this, g.points, reference);
  return g;
}

std::vector<Point> ManifoldModel::dense_sequence(int count) const {
  require(count >= 1, ErrorCode::InvalidInput, "count must be >= 1");
  std::vector<Point> out;
  out.reserve(count);
  switch (kind_) {
    case ManifoldKind::Circle:
      for (int j = 0; j < count; ++j) out.push_back(circle_point(j * kGoldenAngle));
      break;
    case ManifoldKind::FlatTorus:
      for (int j = 0; j < count; ++j) {
        Eigen::VectorXd x(dim_);
        for (int i = 0; i < dim_; ++i) x[i] = periods_[i] * radical_inverse(j, nth_prime(i));
        out.push_back(Point{x});
      }
      break;
    case ManifoldKind::Sphere:
      if (dim_ == 1) {
        for (int j = 0; j < count; ++j) out.push_back(Point{unit_circle(wrap_angle(j * kGoldenAngle))});
      } else if (dim_ == 2) {
        // Golden-angle longitudes with base-2 radical-inverse heights (equal-area in z).
        for (int j = 0; j < count; ++j) {
          const double z = 1.0 - 2.0 * radical_inverse(j, 2);
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double phi = j * kGoldenAngle;
          Eigen::VectorXd x(3);
          x << rho * std::cos(phi), rho * std::sin(phi), z;
          out.push_back(Point{x});
        }
      } else {
        // Halton points of the cube [-1,1]^{d+1}, kept when inside the unit ball, projected radially.
        for (std::uint64_t j = 1; static_cast<int>(out.size()) < count; ++j) {
          Eigen::VectorXd y(dim_ + 1);
          for (int i = 0; i <= dim_; ++i) y[i] = 2.0 * radical_inverse(j, nth_prime(i)) - 1.0;
          const double n = y.norm();
          if (n <= 1.0 && n > 1e-3) out.push_back(Point{y / n});
        }
      }
      break;
  }
  return out;
}

Point ManifoldModel::random_point(std::mt19937_64& rng) const {
  switch (kind_) {
    case ManifoldKind::Circle: {
      std::uniform_real_distribution<double> u(-kPi, kPi);
      return circle_point(u(rng));
    }
    case ManifoldKind::Sphere: {
      std::normal_distribution<double> g;
      Eigen::VectorXd x(dim_ + 1);
      do {
        for (int i = 0; i <= dim_; ++i) x[i] = g(rng);
      } while (x.norm() < 1e-12);
      return Point{x.normalized()};
    }
    case ManifoldKind::FlatTorus: {
      Eigen::VectorXd x(dim_);
      for (int i = 0; i < dim_; ++i) {
        std::uniform_real_distribution<double> u(0.0, periods_[i]);
        x[i] = u(rng);
      }
      return point(x);
    }
  }
  return Point{};
}

TangentVector ManifoldModel::random_unit_tangent(const Point& q, std::mt19937_64& rng) const {
  std::normal_distribution<double> g;
  Eigen::VectorXd c(dim_);
  do {
    for (int i = 0; i < dim_; ++i) c[i] = g(rng);
  } while (c.norm() < 1e-12);
  return tangent(q, c.normalized());
}

double covering_radius(const ManifoldModel& m, const std::vector<Point>& points,
                       const std::vector<Point>& reference) {
  require(!points.empty(), ErrorCode::InvalidInput, "covering radius of an empty set");
  std::vector<double> nearest(reference.size());
  if (m.kind() == ManifoldKind::Sphere) {
    // Chordal distance bounds the gap in the last coordinate, so search a band sorted by it.
    const int last = m.coord_dim() - 1;
    std::vector<const Point*> sorted;
    sorted.reserve(points.size());
    for (const auto& p : points) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [last](const Point* a, const Point* b) { return a->coords[last] < b->coords[last]; });
    std::vector<double> keys(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) keys[i] = sorted[i]->coords[last];
    parallel_for(reference.size(), [&](std::size_t r) {
      const Eigen::VectorXd& y = reference[r].coords;
      const double z = y[last];
      const auto start = std::lower_bound(keys.begin(), keys.end(), z) - keys.begin();
      double best = std::numeric_limits<double>::infinity();
      for (auto i = start; i < static_cast<std::ptrdiff_t>(keys.size()) && keys[i] - z < best; ++i)
        best = std::min(best, (sorted[i]->coords - y).norm());
      for (auto i = start - 1; i >= 0 && z - keys[i] < best; --i)
        best = std::min(best, (sorted[i]->coords - y).norm());
      nearest[r] = chord_to_arc(best);
    });
  } else {
    parallel_for(reference.size(), [&](std::size_t r) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : points) best = std::min(best, m.distance(p, reference[r]));
      nearest[r] = best;
    });
  }
  double worst = 0.0;
  for (double v : nearest) worst = std::max(worst, v);
  return worst;
}

}  // namespace frechet
