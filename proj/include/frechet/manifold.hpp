#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace frechet {

/// Default tolerance for floating-point cut-locus membership.
inline constexpr double kDefaultCutTol = 1e-7;

enum class ManifoldKind { Circle, Sphere, FlatTorus };

/// Chart-free point. Circle: angle in (-pi, pi]. Sphere(d): unit vector in R^{d+1}.
/// FlatTorus(d): coordinates reduced to [0, period_i).
struct Point {
  Eigen::VectorXd coords;
};

/// Tangent vector with components in the fixed orthonormal frame of ManifoldModel::frame(base).
struct TangentVector {
  Point base;
  Eigen::VectorXd components;

  double norm() const { return components.norm(); }
  TangentVector scaled(double s) const { return {base, s * components}; }
};

/// Minimizing preimages of x under exp_q.
///
/// When x is antipodal to q on a sphere of dimension >= 2 the preimage set is a whole sphere
/// of radius pi; `vectors` then holds the 2*dim frame sample (+-d e_i) and `continuum` is set.
struct LogSet {
  std::vector<TangentVector> vectors;
  bool continuum = false;

  bool multivalued() const { return continuum || vectors.size() >= 2; }
};

struct Grid {
  std::vector<Point> points;
  double covering_radius = 0.0;
};

/// Closed-form Riemannian model: circle, round sphere S^d, or flat torus T^d.
/// Immutable; all operations are pure.
class ManifoldModel {
 public:
  static ManifoldModel circle();
  static ManifoldModel sphere(int dim);
  static ManifoldModel flat_torus(int dim);
  static ManifoldModel flat_torus(const Eigen::VectorXd& periods);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Length of Point::coords.
  int coord_dim() const { return kind_ == ManifoldKind::Sphere ? dim_ + 1 : dim_; }
  const Eigen::VectorXd& periods() const { return periods_; }
  std::string name() const;

  double injectivity_radius() const;
  double diameter() const;

  /// Canonicalizes coordinates (wraps angles, renormalizes sphere points).
  Point point(const Eigen::VectorXd& coords) const;
  Point point(std::initializer_list<double> coords) const;
  /// Throws invalid-input unless `p` has this model's coordinate layout.
  void check(const Point& p) const;

  TangentVector tangent(const Point& base, const Eigen::VectorXd& components) const;
  TangentVector tangent(const Point& base, std::initializer_list<double> components) const;
  TangentVector zero_tangent(const Point& base) const;
  /// Tangent vector whose ambient embedding is the projection of `ambient` onto T_base.
  TangentVector from_ambient(const Point& base, const Eigen::VectorXd& ambient) const;

  /// Orthonormal frame at q as columns (coord_dim x dim).
  Eigen::MatrixXd frame(const Point& q) const;
  /// Ambient representation of v (for the circle: d/dtheta coordinates, i.e. components).
  Eigen::VectorXd embed(const TangentVector& v) const;

  double distance(const Point& q, const Point& x) const;
  Point exp(const TangentVector& v) const;
  LogSet log_set(const Point& q, const Point& x, double tol = kDefaultCutTol) const;
  /// First member of log_set (lexicographically smallest components).
  TangentVector log(const Point& q, const Point& x, double tol = kDefaultCutTol) const;

  /// Exact distance from x to the cut locus of q.
  double cut_locus_distance(const Point& q, const Point& x) const;
  bool in_cut_locus_plus(const Point& q, const Point& x, double tol = kDefaultCutTol) const;
  /// Farthest point from q: -q on spheres, q + pi on the circle, the cell corner on tori.
  Point antipode(const Point& q) const;

  Grid grid(int resolution) const;
  std::vector<Point> dense_sequence(int count) const;

  Point random_point(std::mt19937_64& rng) const;
  TangentVector random_unit_tangent(const Point& q, std::mt19937_64& rng) const;

  bool operator==(const ManifoldModel& other) const;

 private:
  ManifoldModel(ManifoldKind kind, int dim, Eigen::VectorXd periods);

  ManifoldKind kind_;
  int dim_;
  Eigen::VectorXd periods_;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Covering radius of `points`, estimated as the largest nearest-neighbour distance from the
/// members of `reference` (exact for the lattice models when reference is fine enough).
double covering_radius(const ManifoldModel& m, const std::vector<Point>& points,
                       const std::vector<Point>& reference);

}  // namespace frechet
