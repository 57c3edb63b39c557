#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frechet/manifold.hpp"
#include "frechet/solver.hpp"

namespace frechet {

/// Deterministic real-valued function on a manifold.
struct ScalarField {
  ManifoldModel manifold;
  std::function<double(const Point&)> evaluate;
  std::string label;
  std::optional<double> lipschitz;
  /// b such that t -> f(exp(tv)) - b t^2 |v|^2 / 2 is concave near every point.
  std::optional<double> semiconcavity;

  double operator()(const Point& q) const { return evaluate(q); }
};

ScalarField distance_field(const ManifoldModel& m, const Point& x);
ScalarField power_distance_field(const ManifoldModel& m, const Point& x, double p);
ScalarField squared_distance_field(const ManifoldModel& m, const Point& x);
ScalarField frechet_field(const FrechetProblem& prob);
ScalarField sum_field(const ScalarField& a, const ScalarField& b);

enum class Extrapolation { None, Richardson };
enum class Confidence { Converged, Noisy };

std::string to_string(Extrapolation e);
std::string to_string(Confidence c);

struct StepSchedule {
  std::vector<double> steps;  // strictly decreasing, positive
  Extrapolation extrapolation = Extrapolation::Richardson;
  double confidence_tol = 1e-6;

  /// t_k = t0 2^-k for k = 0..count-1.
  static StepSchedule geometric(double t0 = 1e-2, int count = 9);
  void validate() const;
};

struct ProbeStep {
  double t;
  double quotient;
  double extrapolated;  // Richardson value using this and the previous step (quotient for k = 0)
};

struct ProbeReport {
  double value = 0.0;
  std::vector<ProbeStep> table;
  double residual = 0.0;  // |R_last - R_prev| with Richardson, |Q_last - Q_prev| otherwise
  bool monotone = true;   // only checked when a semiconcavity bound is known
  Confidence confidence = Confidence::Converged;
};

/// One-sided derivative lim (f(exp_q(tv)) - f(q)) / t along the schedule.
ProbeReport directional_derivative(const ScalarField& f, const Point& q, const TangentVector& v,
                                   const StepSchedule& sched = StepSchedule::geometric());

/// D_q f(v) + D_q f(-v); nonpositive for semiconcave f, zero iff D_q f is linear along v.
ProbeReport symmetrized_differential(const ScalarField& f, const Point& q, const TangentVector& v,
                                     const StepSchedule& sched = StepSchedule::geometric());

/// Closed-form one-sided derivative of d_x^p at q: -p d^{p-2} sup <v, w> over minimizing preimages w.
/// Throws nonlinear-at-atom for p = 1 and x = q.
double first_variation_differential(const ManifoldModel& m, const Point& x, const Point& q,
                                    const TangentVector& v, double p = 2.0,
                                    double tol = kDefaultCutTol);

/// Closed-form D_q F^(p)(v) as the weighted sum of per-atom differentials.
double frechet_first_variation(const FrechetProblem& prob, const Point& q, const TangentVector& v,
                               double tol = kDefaultCutTol);

/// Unit directions: frame vectors with both signs, then quasi-random fill up to `count`.
std::vector<TangentVector> probe_directions(const ManifoldModel& m, const Point& q, int count);

struct LinearityReport {
  double gap = 0.0;  // max over directions of -symmetrized differential, clamped at 0
  TangentVector worst_direction;
  bool noisy = false;
};

LinearityReport linearity_report(const ScalarField& f, const Point& q, int direction_count,
                                 const StepSchedule& sched = StepSchedule::geometric());
double linearity_gap(const ScalarField& f, const Point& q, int direction_count,
                     const StepSchedule& sched = StepSchedule::geometric());

/// Max second central difference (f(g(h)) - 2 f(g(0)) + f(g(-h))) / h^2 along random unit-speed
/// geodesics through random centers in B_r(q). A lower estimate of the semiconcavity constant.
double semiconcavity_estimate(const ScalarField& f, const Point& q, double radius,
                              int geodesic_count = 200, double step = 1e-3,
                              std::uint64_t seed = 0);

}  // namespace frechet
