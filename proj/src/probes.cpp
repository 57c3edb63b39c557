#include "frechet/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "frechet/error.hpp"
#include "frechet/parallel.hpp"

namespace frechet {
namespace {

double pow_p(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 1.0) return d;
  return std::pow(d, p);
}

// Quotients (sum_k f(exp(t v_k)) - n f(q)) / t for the given directions.
ProbeReport probe(const ScalarField& f, const Point& q, const std::vector<TangentVector>& dirs,
                  const StepSchedule& sched) {
  sched.validate();
  const auto& m = f.manifold;
  m.check(q);
  double speed = 0.0, speed2 = 0.0;
  for (const auto& v : dirs) {
    speed = std::max(speed, v.norm());
    speed2 += v.components.squaredNorm();
  }
  require(sched.steps.front() * speed < m.injectivity_radius(), ErrorCode::InvalidInput,
          "probe steps must stay within the injectivity radius");

  const double fq = f(q);
  ProbeReport rep;
  for (std::size_t k = 0; k < sched.steps.size(); ++k) {
    const double t = sched.steps[k];
    double s = 0.0;
    for (const auto& v : dirs) s += f(m.exp(v.scaled(t))) - fq;
    const double quotient = s / t;
    double extrapolated = quotient;
    if (sched.extrapolation == Extrapolation::Richardson && k > 0) {
      const double tp = sched.steps[k - 1];
      extrapolated = (tp * quotient - t * rep.table.back().quotient) / (tp - t);
    }
    rep.table.push_back({t, quotient, extrapolated});
  }

  const std::size_t n = rep.table.size();
  rep.value = rep.table.back().extrapolated;
  if (n >= 2) {
    const bool rich = sched.extrapolation == Extrapolation::Richardson && n >= 3;
    rep.residual = rich ? std::abs(rep.table[n - 1].extrapolated - rep.table[n - 2].extrapolated)
                        : std::abs(rep.table[n - 1].quotient - rep.table[n - 2].quotient);
  }
  if (f.semiconcavity) {
    // Q(t) - b t |v|^2 / 2 is nonincreasing in t for b-concave f.
    const double b = *f.semiconcavity;
    for (std::size_t k = 1; k < n; ++k) {
      const double prev = rep.table[k - 1].quotient - 0.5 * b * speed2 * rep.table[k - 1].t;
      const double cur = rep.table[k].quotient - 0.5 * b * speed2 * rep.table[k].t;
      const double slack = 1e-12 * (1.0 + std::abs(fq)) * dirs.size() / rep.table[k].t;
      if (cur < prev - slack) rep.monotone = false;
    }
  }
  rep.confidence = (rep.residual <= sched.confidence_tol && rep.monotone) ? Confidence::Converged
                                                                          : Confidence::Noisy;
  return rep;
}

}  // namespace

ScalarField distance_field(const ManifoldModel& m, const Point& x) {
  return power_distance_field(m, x, 1.0);
}

ScalarField power_distance_field(const ManifoldModel& m, const Point& x, double p) {
  require(p >= 1.0, ErrorCode::InvalidInput, "distance power must be >= 1");
  m.check(x);
  ScalarField f{m, [m, x, p](const Point& q) { return pow_p(m.distance(q, x), p); },
                p == 1.0 ? "d_x" : (p == 2.0 ? "d_x^2" : "d_x^p"), std::nullopt, std::nullopt};
  if (p == 1.0) f.lipschitz = 1.0;
  if (p == 2.0) {
    f.lipschitz = 2.0 * m.diameter();
    // The flat metric and the positively curved sphere both give Hess d^2 <= 2.
    f.semiconcavity = 2.0;
  }
  return f;
}

ScalarField squared_distance_field(const ManifoldModel& m, const Point& x) {
  return power_distance_field(m, x, 2.0);
}

ScalarField frechet_field(const FrechetProblem& prob) {
  ScalarField f{prob.manifold(), [prob](const Point& q) { return frechet_value(prob, q); },
                prob.exponent == 2.0 ? "F" : "F^(p)", std::nullopt, std::nullopt};
  if (prob.exponent == 2.0) {
    f.lipschitz = 2.0 * prob.manifold().diameter();
    f.semiconcavity = 2.0;
  }
  return f;
}

ScalarField sum_field(const ScalarField& a, const ScalarField& b) {
  require(a.manifold == b.manifold, ErrorCode::InvalidInput, "fields live on different manifolds");
  ScalarField f{a.manifold, [fa = a.evaluate, fb = b.evaluate](const Point& q) { return fa(q) + fb(q); },
                a.label + " + " + b.label, std::nullopt, std::nullopt};
  if (a.lipschitz && b.lipschitz) f.lipschitz = *a.lipschitz + *b.lipschitz;
  if (a.semiconcavity && b.semiconcavity) f.semiconcavity = *a.semiconcavity + *b.semiconcavity;
  return f;
}

std::string to_string(Extrapolation e) { return e == Extrapolation::None ? "none" : "richardson"; }
std::string to_string(Confidence c) { return c == Confidence::Converged ? "converged" : "noisy"; }

StepSchedule StepSchedule::geometric(double t0, int count) {
  require(t0 > 0.0 && count >= 1, ErrorCode::InvalidInput, "bad geometric step schedule");
  StepSchedule s;
  for (int k = 0; k < count; ++k) s.steps.push_back(std::ldexp(t0, -k));
  return s;
}

void StepSchedule::validate() const {
  require(!steps.empty(), ErrorCode::InvalidInput, "step schedule is empty");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    require(std::isfinite(steps[k]) && steps[k] > 0.0, ErrorCode::InvalidInput,
            "probe steps must be positive");
    require(k == 0 || steps[k] < steps[k - 1], ErrorCode::InvalidInput,
            "probe steps must be strictly decreasing");
  }
  require(confidence_tol > 0.0, ErrorCode::InvalidInput, "confidence tolerance must be > 0");
}

ProbeReport directional_derivative(const ScalarField& f, const Point& q, const TangentVector& v,
                                   const StepSchedule& sched) {
  return probe(f, q, {v}, sched);
}

ProbeReport symmetrized_differential(const ScalarField& f, const Point& q, const TangentVector& v,
                                     const StepSchedule& sched) {
  return probe(f, q, {v, v.scaled(-1.0)}, sched);
}

double first_variation_differential(const ManifoldModel& m, const Point& x, const Point& q,
                                    const TangentVector& v, double p, double tol) {
  require(p >= 1.0, ErrorCode::InvalidInput, "distance power must be >= 1");
  const double d = m.distance(q, x);
  if (d == 0.0) {
    if (p == 1.0)
      throw Error(ErrorCode::NonlinearAtAtom, "D_q d_q(v) = |v| is not linear at the atom");
    return 0.0;
  }
  const LogSet ls = m.log_set(q, x, tol);
  double sup = -std::numeric_limits<double>::infinity();
  if (ls.continuum) {
    sup = d * v.norm();
  } else {
    for (const auto& w : ls.vectors) sup = std::max(sup, v.components.dot(w.components));
  }
  return -p * pow_p(d, p - 2.0) * sup;
}

double frechet_first_variation(const FrechetProblem& prob, const Point& q, const TangentVector& v,
                               double tol) {
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    s += w[i] * first_variation_differential(prob.manifold(), atoms[i], q, v, prob.exponent, tol);
  return s;
}

std::vector<TangentVector> probe_directions(const ManifoldModel& m, const Point& q, int count) {
  const int d = m.dim();
  require(count >= 2 * d, ErrorCode::InvalidInput, "direction count must be >= 2 * dim");
  std::vector<TangentVector> out;
  for (int i = 0; i < d; ++i)
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      e[i] = s;
      out.push_back(m.tangent(q, e));
    }
  if (d == 1) return out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::mt19937_64 rng(0x5eedULL);
  for (int j = 1; static_cast<int>(out.size()) < count; ++j) {
    if (d == 2) {
      const double a = 0.5 + j * golden;
      out.push_back(m.tangent(q, {std::cos(a), std::sin(a)}));
    } else {
      out.push_back(m.random_unit_tangent(q, rng));
    }
  }
  return out;
}

LinearityReport linearity_report(const ScalarField& f, const Point& q, int direction_count,
                                 const StepSchedule& sched) {
  const auto dirs = probe_directions(f.manifold, q, direction_count);
  std::vector<ProbeReport> reps(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t k) { reps[k] = symmetrized_differential(f, q, dirs[k], sched); });
  LinearityReport out{0.0, dirs.front(), false};
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    if (-reps[k].value > out.gap) {
      out.gap = -reps[k].value;
      out.worst_direction = dirs[k];
    }
    out.noisy = out.noisy || reps[k].confidence == Confidence::Noisy;
  }
  return out;
}

double linearity_gap(const ScalarField& f, const Point& q, int direction_count,
                     const StepSchedule& sched) {
  return linearity_report(f, q, direction_count, sched).gap;
}

double semiconcavity_estimate(const ScalarField& f, const Point& q, double radius,
                              int geodesic_count, double step, std::uint64_t seed) {
  const auto& m = f.manifold;
  m.check(q);
  require(radius >= 0.0 && step > 0.0 && geodesic_count >= 1, ErrorCode::InvalidInput,
          "semiconcavity probe needs radius >= 0, step > 0 and at least one geodesic");
  require(radius + step < m.injectivity_radius(), ErrorCode::InvalidInput,
          "radius + step must stay below the injectivity radius");

  // Draw all centers and directions first so the result does not depend on threading.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<TangentVector> dirs;
  std::vector<Point> centers;
  for (int k = 0; k < geodesic_count; ++k) {
    const TangentVector u = m.random_unit_tangent(q, rng);
    const double s = radius * std::pow(unif(rng), 1.0 / m.dim());
    centers.push_back(m.exp(u.scaled(s)));
    dirs.push_back(m.random_unit_tangent(centers.back(), rng));
  }
  std::vector<double> second(geodesic_count);
  parallel_for(geodesic_count, [&](std::size_t k) {
    const double fp = f(m.exp(dirs[k].scaled(step)));
    const double fm = f(m.exp(dirs[k].scaled(-step)));
    second[k] = (fp - 2.0 * f(centers[k]) + fm) / (step * step);
  });
  return *std::max_element(second.begin(), second.end());
}

}  // namespace frechet
