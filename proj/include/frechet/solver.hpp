#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "frechet/manifold.hpp"
#include "frechet/measure.hpp"

namespace frechet {

/// Fréchet p-function F(q) = sum_i w_i d(q, x_i)^p of an atom measure.
struct FrechetProblem {
  AtomMeasure measure;
  double exponent = 2.0;

  FrechetProblem(AtomMeasure mu, double p = 2.0);
  const ManifoldModel& manifold() const { return measure.manifold(); }
};

struct SolverParams {
  double step = 0.5;                // tau in (0, 1]
  int max_iterations = 10000;
  double grad_tolerance = 1e-9;
  int restart_count = 2;            // retries with halved tau after a step-size failure
  std::uint64_t tie_break_seed = 0; // 0: lexicographically smallest preimage
  double cut_tol = kDefaultCutTol;
  std::vector<double> epsilons{1e-6, 0.025, 0.05, 0.1, 0.2};

  void validate() const;
};

struct CutMassProfile {
  std::vector<std::pair<double, double>> profile;  // (epsilon, mass), epsilon ascending
  double exact_mass = 0.0;                         // membership in C+ at tol = min epsilon
};

struct MeanResult {
  Point mean;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  CutMassProfile cut_mass;
  double atom_at_mean_mass = 0.0;
  bool multivalued = false;       // some atom has several minimizing preimages at the mean
  bool le_barden_regime = false;  // p = 1, atom at the mean and mass on its cut locus
};

struct GradientResult {
  /// Descent direction G = sum_i w_i p d_i^{p-1} log_q(x_i) / d_i; F decreases along G.
  TangentVector direction;
  bool multivalued = false;
  /// Mass of atoms within tol of q (p = 1 only; these are excluded from G).
  double atom_mass = 0.0;
};

double frechet_value(const FrechetProblem& prob, const Point& q);

/// sum_i w_i (d(q, x_i)^p - d(q0, x_i)^p), computed as a single sum.
double frechet_difference(const FrechetProblem& prob, const Point& q, const Point& q0);

/// First-variation descent direction. Throws atom-at-query for p = 1 with an atom within tol of q.
GradientResult gradient(const FrechetProblem& prob, const Point& q, double tol = kDefaultCutTol,
                        std::uint64_t tie_break_seed = 0);

/// sum_i w_i log_q(x_i), the residual of the tangent-space mean condition.
TangentVector log_mean(const FrechetProblem& prob, const Point& q, double tol = kDefaultCutTol);

/// Fixed-step first-order iteration
///   q <- exp(q, tau G / (p max(1, dbar^{p-1})))
/// with halving of rejected steps. For p = 1 atoms at the iterate are excluded from G and an
/// atom is accepted as the mean when the remaining pull is within its mass.
MeanResult gradient_descent_mean(const FrechetProblem& prob, const Point& init,
                                 const SolverParams& params = {});

/// Same iteration as gradient_descent_mean; additionally flags the p = 1 regime in which the
/// mean is an atom and its cut locus carries mass.
MeanResult p_mean(const FrechetProblem& prob, const Point& init, const SolverParams& params = {});

struct BruteForceResult {
  MeanResult refined;              // descent from the first grid minimizer
  Point grid_minimum;
  double grid_value = 0.0;
  double covering_radius = 0.0;
  std::vector<Point> near_tie_grid;   // grid points within near_tie_tol of the minimum
  std::vector<MeanResult> near_ties;  // distinct refined minima from those grid points
};

BruteForceResult brute_force_mean(const FrechetProblem& prob, int resolution,
                                  const SolverParams& params = {}, double near_tie_tol = 1e-9);

CutMassProfile cut_mass(const FrechetProblem& prob, const Point& mu,
                        const std::vector<double>& epsilons);

struct LeBardenExample {
  AtomMeasure measure;
  MeanResult mean;
  std::size_t configurations_tried = 0;
};

/// Searches weighted four-atom circle configurations whose 1-mean is an atom with a weighted
/// antipode. Throws search-budget-exhausted when no configuration qualifies within `budget`.
LeBardenExample find_le_barden_example(int resolution, std::size_t budget = 50'000'000);

/// Minimizer of sum_i w_i d(theta, x_i) over the circle by evaluation at all breakpoints
/// (atoms and their antipodes); returns (theta, value, runner-up value).
struct CircleMedian {
  double theta;
  double value;
  double second_value;
};
CircleMedian exact_circle_median(std::span<const double> angles, std::span<const double> weights);

}  // namespace frechet
