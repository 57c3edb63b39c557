#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "frechet/manifold.hpp"

namespace frechet {

/// Finitely supported probability measure: distinct atoms with positive weights summing to one.
class AtomMeasure {
 public:
  const ManifoldModel& manifold() const { return manifold_; }
  std::span<const Point> atoms() const { return atoms_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  friend AtomMeasure make_measure(const ManifoldModel&, std::vector<Point>, std::vector<double>);
  AtomMeasure(ManifoldModel m, std::vector<Point> atoms, std::vector<double> weights)
      : manifold_(std::move(m)), atoms_(std::move(atoms)), weights_(std::move(weights)) {}

  ManifoldModel manifold_;
  std::vector<Point> atoms_;
  std::vector<double> weights_;
};

/// Normalizes weights, drops zero-weight atoms and merges coincident atoms (summing weights).
/// Throws invalid-input on empty input, length mismatch, negative or non-finite weights.
AtomMeasure make_measure(const ManifoldModel& m, std::vector<Point> atoms,
                         std::vector<double> weights);

/// sum_j 2^-j delta_{x_j}, j = 1..J, over the manifold's dense sequence, renormalized to mass 1.
AtomMeasure dyadic_dirac_measure(const ManifoldModel& m, int count);

/// n equally spaced equal-weight atoms on the equator {x_{d+1} = 0} of a sphere.
AtomMeasure equator_lattice(const ManifoldModel& sphere, int n);

enum class SamplerKind { UniformGrid, UniformSubmanifold, WrappedGaussian };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::WrappedGaussian;
  std::uint64_t seed = 0;
  int count = 1;
  /// WrappedGaussian center; defaults to the origin (torus/circle) or the last basis vector (sphere).
  std::optional<Point> center;
  double sigma = 0.1;
};

/// Empirical measure of `count` i.i.d. draws with equal weights.
///
/// UniformGrid draws from the normalized Riemannian volume; UniformSubmanifold draws uniformly on
/// the equator {x_last = 0} (sphere of dim >= 2, or torus of dim >= 2); WrappedGaussian wraps per
/// axis on circle/torus and pushes a tangent Gaussian through exp on spheres (norms above pi rejected).
AtomMeasure sample_measure(const SamplerSpec& spec, const ManifoldModel& m);

/// sum_i w_i d(q, x_i)^p
double moment(const AtomMeasure& mu, const Point& q, double p);

}  // namespace frechet
