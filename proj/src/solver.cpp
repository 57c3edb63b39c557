#include "frechet/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "frechet/error.hpp"
#include "frechet/parallel.hpp"

namespace frechet {
namespace {

constexpr int kMaxHalvings = 20;
constexpr int kDivergenceWindow = 10;

double pow_p(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 1.0) return d;
  return std::pow(d, p);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const TangentVector& pick_preimage(const LogSet& ls, std::uint64_t seed, std::size_t atom) {
  if (seed == 0 || ls.vectors.size() == 1) return ls.vectors.front();
  return ls.vectors[splitmix64(seed ^ (atom * 0x632be59bd9b4e019ULL)) % ls.vectors.size()];
}

// Descent direction with p = 1 atoms at q optionally excluded instead of rejected.
GradientResult direction(const FrechetProblem& prob, const Point& q, double tol,
                         std::uint64_t seed, bool exclude_atoms) {
  const auto& m = prob.manifold();
  const double p = prob.exponent;
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();
  GradientResult out{m.zero_tangent(q), false, 0.0};
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double d = m.distance(q, atoms[i]);
    if (p == 1.0 && d <= tol) {
      if (!exclude_atoms)
        throw Error(ErrorCode::AtomAtQuery, "p = 1 gradient is not defined at an atom");
      out.atom_mass += w[i];
      continue;
    }
    if (d == 0.0) continue;
    const LogSet ls = m.log_set(q, atoms[i], tol);
    out.multivalued = out.multivalued || ls.multivalued();
    const TangentVector& v = pick_preimage(ls, seed, i);
    const double vn = v.norm();
    if (vn == 0.0) continue;
    out.direction.components += (w[i] * p * pow_p(d, p - 1.0) / vn) * v.components;
  }
  return out;
}

std::size_t nearest_atom(const FrechetProblem& prob, const Point& q) {
  const auto atoms = prob.measure.atoms();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double d = prob.manifold().distance(q, atoms[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double mass_at(const FrechetProblem& prob, const Point& q, double tol) {
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (prob.manifold().distance(q, atoms[i]) <= tol) s += w[i];
  return s;
}

MeanResult descend_once(const FrechetProblem& prob, const Point& init, const SolverParams& params,
                        double tau) {
  const auto& m = prob.manifold();
  const double p = prob.exponent;
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();

  MeanResult res;
  Point x = m.point(init.coords);
  double fx = frechet_value(prob, x);
  double prev_stat = std::numeric_limits<double>::infinity();
  bool last_increase = false;
  int stalled = 0;
  GradientResult g;
  double stat = 0.0;
  int it = 0;
  for (;; ++it) {
    g = direction(prob, x, params.cut_tol, params.tie_break_seed, true);
    stat = g.direction.norm();
    if (p == 1.0) stat = std::max(0.0, stat - g.atom_mass);

    // Neither the value nor the stationarity measure improved.
    stalled = (last_increase && stat >= prev_stat) ? stalled + 1 : 0;
    if (stalled >= kDivergenceWindow)
      throw Error(ErrorCode::StepSize, "no progress for " + std::to_string(kDivergenceWindow) +
                                           " consecutive steps; retry with a smaller step size");
    prev_stat = stat;
    if (stat < params.grad_tolerance) {
      res.converged = true;
      break;
    }
    if (it >= params.max_iterations) break;

    double dbar = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) dbar += w[i] * m.distance(x, atoms[i]);
    const double scale = tau / (p * std::max(1.0, pow_p(dbar, p - 1.0)));
    TangentVector step = g.direction.scaled(scale);

    const double slack = 1e-12 * std::max(1.0, std::abs(fx));
    bool accepted = false;
    Point cand;
    double fc = 0.0;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      cand = m.exp(step);
      fc = frechet_value(prob, cand);
      if (p == 1.0) {
        // F is not differentiable at atoms; land on one exactly when it is at least as good.
        const Point& a = atoms[nearest_atom(prob, cand)];
        if (m.distance(x, a) > params.cut_tol && m.distance(x, a) <= step.norm()) {
          const double fa = frechet_value(prob, a);
          if (fa <= fc) {
            cand = a;
            fc = fa;
          }
        }
      }
      if (fc <= fx + slack) {
        accepted = true;
        break;
      }
      step = step.scaled(0.5);
    }
    if (!accepted)
      throw Error(ErrorCode::StepSize, "step rejected after " + std::to_string(kMaxHalvings) +
                                           " halvings; retry with a smaller step size");
    last_increase = fc > fx;
    x = cand;
    fx = fc;
  }

  res.mean = x;
  res.value = fx;
  res.grad_norm = stat;
  res.iterations = it;
  res.multivalued = g.multivalued;
  res.atom_at_mean_mass = mass_at(prob, x, params.cut_tol);
  res.cut_mass = cut_mass(prob, x, params.epsilons);
  return res;
}

}  // namespace

FrechetProblem::FrechetProblem(AtomMeasure mu, double p) : measure(std::move(mu)), exponent(p) {
  require(std::isfinite(p) && p >= 1.0, ErrorCode::InvalidInput, "exponent p must be >= 1");
}

void SolverParams::validate() const {
  require(step > 0.0 && step <= 1.0, ErrorCode::InvalidInput, "step size must lie in (0, 1]");
  require(max_iterations >= 0, ErrorCode::InvalidInput, "max_iterations must be >= 0");
  require(grad_tolerance > 0.0, ErrorCode::InvalidInput, "grad_tolerance must be > 0");
  require(restart_count >= 0, ErrorCode::InvalidInput, "restart_count must be >= 0");
  require(cut_tol > 0.0, ErrorCode::InvalidInput, "cut_tol must be > 0");
  require(!epsilons.empty(), ErrorCode::InvalidInput, "epsilons must be nonempty");
}

double frechet_value(const FrechetProblem& prob, const Point& q) {
  return moment(prob.measure, q, prob.exponent);
}

double frechet_difference(const FrechetProblem& prob, const Point& q, const Point& q0) {
  const auto& m = prob.manifold();
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    s += w[i] * (pow_p(m.distance(q, atoms[i]), prob.exponent) -
                 pow_p(m.distance(q0, atoms[i]), prob.exponent));
  return s;
}

GradientResult gradient(const FrechetProblem& prob, const Point& q, double tol,
                        std::uint64_t tie_break_seed) {
  prob.manifold().check(q);
  return direction(prob, q, tol, tie_break_seed, false);
}

TangentVector log_mean(const FrechetProblem& prob, const Point& q, double tol) {
  const auto& m = prob.manifold();
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();
  TangentVector out = m.zero_tangent(q);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    out.components += w[i] * m.log(q, atoms[i], tol).components;
  return out;
}

MeanResult gradient_descent_mean(const FrechetProblem& prob, const Point& init,
                                 const SolverParams& params) {
  params.validate();
  prob.manifold().check(init);
  double tau = params.step;
  for (int attempt = 0;; ++attempt) {
    try {
      return descend_once(prob, init, params, tau);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StepSize || attempt >= params.restart_count) throw;
      tau *= 0.5;
    }
  }
}

MeanResult p_mean(const FrechetProblem& prob, const Point& init, const SolverParams& params) {
  MeanResult r = gradient_descent_mean(prob, init, params);
  r.le_barden_regime =
      prob.exponent == 1.0 && r.atom_at_mean_mass > 0.0 && r.cut_mass.exact_mass > 0.0;
  return r;
}

BruteForceResult brute_force_mean(const FrechetProblem& prob, int resolution,
                                  const SolverParams& params, double near_tie_tol) {
  const Grid grid = prob.manifold().grid(resolution);
  std::vector<double> values(grid.points.size());
  parallel_for(grid.points.size(),
               [&](std::size_t k) { values[k] = frechet_value(prob, grid.points[k]); });

  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[best]) best = k;

  BruteForceResult out;
  out.grid_minimum = grid.points[best];
  out.grid_value = values[best];
  out.covering_radius = grid.covering_radius;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] <= values[best] + near_tie_tol) out.near_tie_grid.push_back(grid.points[k]);

  out.refined = gradient_descent_mean(prob, out.grid_minimum, params);
  out.near_ties.push_back(out.refined);
  constexpr std::size_t kMaxTies = 32;
  for (std::size_t k = 0; k < out.near_tie_grid.size() && k < kMaxTies; ++k) {
    MeanResult r = gradient_descent_mean(prob, out.near_tie_grid[k], params);
    const bool seen = std::any_of(out.near_ties.begin(), out.near_ties.end(), [&](const MeanResult& t) {
      return prob.manifold().distance(t.mean, r.mean) < 1e-6;
    });
    if (!seen) out.near_ties.push_back(std::move(r));
  }
  return out;
}

CutMassProfile cut_mass(const FrechetProblem& prob, const Point& mu,
                        const std::vector<double>& epsilons) {
  require(!epsilons.empty(), ErrorCode::InvalidInput, "epsilons must be nonempty");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    require(epsilons[k] > 0.0, ErrorCode::InvalidInput, "epsilons must be positive");
    require(k == 0 || epsilons[k] > epsilons[k - 1], ErrorCode::InvalidInput,
            "epsilons must be sorted ascending");
  }
  const auto& m = prob.manifold();
  const auto atoms = prob.measure.atoms();
  const auto w = prob.measure.weights();
  std::vector<double> cut_dist(atoms.size());
  CutMassProfile out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cut_dist[i] = m.cut_locus_distance(mu, atoms[i]);
    if (m.in_cut_locus_plus(mu, atoms[i], epsilons.front())) out.exact_mass += w[i];
  }
  for (double eps : epsilons) {
    double mass = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (cut_dist[i] <= eps) mass += w[i];
    out.profile.emplace_back(eps, mass);
  }
  return out;
}

CircleMedian exact_circle_median(std::span<const double> angles, std::span<const double> weights) {
  require(!angles.empty() && angles.size() == weights.size(), ErrorCode::InvalidInput,
          "angles and weights must be nonempty and equal length");
  auto value = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i)
      s += weights[i] * std::abs(wrap_angle(t - angles[i]));
    return s;
  };
  std::vector<double> breaks;
  for (double a : angles) {
    breaks.push_back(wrap_angle(a));
    breaks.push_back(wrap_angle(a + std::numbers::pi));
  }
  CircleMedian best{breaks.front(), value(breaks.front()), std::numeric_limits<double>::infinity()};
  for (double b : breaks) {
    const double v = value(b);
    if (v < best.value) best = {b, v, best.value};
  }
  best.second_value = std::numeric_limits<double>::infinity();
  for (double b : breaks) {
    if (std::abs(wrap_angle(b - best.theta)) <= 1e-12) continue;
    best.second_value = std::min(best.second_value, value(b));
  }
  return best;
}

LeBardenExample find_le_barden_example(int resolution, std::size_t budget) {
  require(resolution >= 100, ErrorCode::InvalidInput, "resolution must be >= 100");
  const double pi = std::numbers::pi;

  // Weight compositions in tenths, most balanced first.
  std::vector<std::array<int, 4>> compositions;
  for (int a = 1; a <= 7; ++a)
    for (int b = 1; a + b <= 8; ++b)
      for (int c = 1; a + b + c <= 9; ++c) compositions.push_back({a, b, c, 10 - a - b - c});
  std::stable_sort(compositions.begin(), compositions.end(), [](const auto& x, const auto& y) {
    return *std::max_element(x.begin(), x.end()) < *std::max_element(y.begin(), y.end());
  });

  std::size_t tried = 0;
  for (const auto& comp : compositions) {
    for (int kc = 1; kc < resolution; ++kc) {
      if (2 * kc == resolution) continue;
      for (int ke = kc + 1; ke < resolution; ++ke) {
        if (2 * ke == resolution) continue;
        if (++tried > budget)
          throw Error(ErrorCode::SearchBudgetExhausted,
                      "no configuration found in " + std::to_string(budget) + " candidates");
        const std::array<double, 4> angles{0.0, pi, wrap_angle(2.0 * pi * kc / resolution),
                                           wrap_angle(2.0 * pi * ke / resolution)};
        std::array<double, 4> weights;
        for (int i = 0; i < 4; ++i) weights[i] = comp[i] / 10.0;
        const CircleMedian med = exact_circle_median(angles, weights);
        if (std::abs(med.theta) > 1e-12 || med.second_value - med.value <= 1e-9) continue;

        const ManifoldModel circle = ManifoldModel::circle();
        std::vector<Point> pts;
        for (double a : angles) pts.push_back(circle.point({a}));
        AtomMeasure mu = make_measure(circle, pts, {weights.begin(), weights.end()});
        FrechetProblem prob(mu, 1.0);
        const Grid g = circle.grid(resolution);
        std::size_t best = 0;
        double best_v = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < g.points.size(); ++k) {
          const double v = frechet_value(prob, g.points[k]);
          if (v < best_v) {
            best_v = v;
            best = k;
          }
        }
        MeanResult r = p_mean(prob, g.points[best]);
        return LeBardenExample{std::move(mu), std::move(r), tried};
      }
    }
  }
  throw Error(ErrorCode::SearchBudgetExhausted, "configuration space exhausted");
}

}  // namespace frechet
