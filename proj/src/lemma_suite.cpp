#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "frechet/error.hpp"
#include "frechet/experiment.hpp"

namespace frechet {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Ctx {
  std::mt19937_64 rng;
  StepSchedule sched;
  int instances;
  double gap_tol;
  std::vector<ManifoldModel> models{ManifoldModel::circle(), ManifoldModel::sphere(2),
                                    ManifoldModel::flat_torus(2)};
};

double uniform(Ctx& c, double a = 0.0, double b = 1.0) {
  return std::uniform_real_distribution<double>(a, b)(c.rng);
}

// A point joined to q by several minimizing geodesics: the antipode, or a torus cell-boundary point.
Point cut_point(const ManifoldModel& m, const Point& q, Ctx& c) {
  if (m.kind() != ManifoldKind::FlatTorus) return m.antipode(q);
  Eigen::VectorXd off(m.dim());
  const int axis = static_cast<int>(uniform(c, 0.0, m.dim())) % m.dim();
  for (int i = 0; i < m.dim(); ++i)
    off[i] = i == axis ? 0.5 * m.periods()[i] : uniform(c, -0.4, 0.4) * m.periods()[i];
  return m.point(q.coords + off);
}

// Random point at least `margin` away from the cut locus of q.
Point clear_point(const ManifoldModel& m, const Point& q, Ctx& c, double margin = 0.05) {
  for (;;) {
    Point x = m.random_point(c.rng);
    if (m.cut_locus_distance(q, x) > margin) return x;
  }
}

FrechetProblem random_problem(const ManifoldModel& m, const Point& q, Ctx& c, int n) {
  std::vector<Point> atoms;
  std::vector<double> w;
  for (int i = 0; i < n; ++i) {
    atoms.push_back(clear_point(m, q, c));
    w.push_back(uniform(c, 0.1, 1.0));
  }
  return FrechetProblem(make_measure(m, atoms, w), 2.0);
}

Check measure_invariants(Ctx& c) {
  bool ok = true;
  double worst = 0.0;
  for (const auto& m : c.models) {
    const AtomMeasure mu = sample_measure({SamplerKind::UniformGrid, c.rng(), 50, std::nullopt, 0.1}, m);
    double s = 0.0;
    for (double w : mu.weights()) s += w;
    ok = ok && std::abs(s - 1.0) <= 1e-12;
    const AtomMeasure dy = dyadic_dirac_measure(m, 12);
    for (std::size_t j = 1; j < dy.size(); ++j)
      ok = ok && std::abs(dy.weights()[j] / dy.weights()[j - 1] - 0.5) <= 1e-15;
    for (int k = 0; k < 200; ++k) {
      const Point a = m.random_point(c.rng), b = m.random_point(c.rng);
      const double lhs = std::abs(moment(mu, a, 1.0) - moment(mu, b, 1.0));
      worst = std::max(worst, lhs - m.distance(a, b));
    }
  }
  ok = ok && worst <= 1e-12;
  return {"measure-invariants", "atom measures are normalized; the first moment is 1-Lipschitz", ok,
          "max Lipschitz excess " + fmt(worst), 0};
}

Check symmetrized_nonpositive(Ctx& c) {
  double worst = -std::numeric_limits<double>::infinity();
  int noisy = 0;
  for (const auto& m : c.models) {
    for (int k = 0; k < c.instances; ++k) {
      const Point q = m.random_point(c.rng);
      const Point x = k % 4 == 0 ? cut_point(m, q, c) : m.random_point(c.rng);
      const TangentVector v = m.random_unit_tangent(q, c.rng);
      const ProbeReport a = symmetrized_differential(squared_distance_field(m, x), q, v, c.sched);
      const FrechetProblem prob = random_problem(m, m.random_point(c.rng), c, 5);
      const ProbeReport b = symmetrized_differential(frechet_field(prob), q, v, c.sched);
      worst = std::max({worst, a.value, b.value});
      noisy += (a.confidence == Confidence::Noisy) + (b.confidence == Confidence::Noisy);
    }
  }
  return {"symmetrized-nonpositive", "D_q f(v) + D_q f(-v) <= 0 for semiconcave f", worst <= 1e-6,
          "max symmetrized differential " + fmt(worst), noisy};
}

Check quotient_additivity(Ctx& c) {
  double worst = 0.0;
  for (const auto& m : c.models) {
    for (int k = 0; k < c.instances; ++k) {
      const Point q = m.random_point(c.rng);
      const FrechetProblem prob = random_problem(m, m.random_point(c.rng), c, 5);
      const TangentVector v = m.random_unit_tangent(q, c.rng);
      const double t = c.sched.steps.front();
      const Point y = m.exp(v.scaled(t));
      const double whole = (frechet_value(prob, y) - frechet_value(prob, q)) / t;
      double parts = 0.0;
      for (std::size_t i = 0; i < prob.measure.size(); ++i) {
        const double dy = m.distance(y, prob.measure.atoms()[i]);
        const double dq = m.distance(q, prob.measure.atoms()[i]);
        parts += prob.measure.weights()[i] * (dy * dy - dq * dq) / t;
      }
      worst = std::max(worst, std::abs(whole - parts));
    }
  }
  return {"quotient-additivity", "difference quotients of F are weighted sums of per-atom quotients",
          worst <= 1e-12, "max discrepancy " + fmt(worst), 0};
}

Check first_variation(Ctx& c) {
  double worst = 0.0;
  int noisy = 0;
  for (const auto& m : c.models) {
    for (int k = 0; k < c.instances; ++k) {
      const Point q = m.random_point(c.rng);
      const Point x = k % 4 == 0 ? cut_point(m, q, c) : m.random_point(c.rng);
      const TangentVector v = m.random_unit_tangent(q, c.rng);
      const ProbeReport r = directional_derivative(squared_distance_field(m, x), q, v, c.sched);
      noisy += r.confidence == Confidence::Noisy;
      worst = std::max(worst, std::abs(r.value - first_variation_differential(m, x, q, v)));
    }
  }
  return {"first-variation", "D_q d_x^2(v) = -2 sup <v, w> over minimizing preimages w",
          worst <= 1e-4, "max |probe - closed form| " + fmt(worst), noisy};
}

Check linearity_dichotomy(Ctx& c) {
  int mismatches = 0, noisy = 0;
  for (const auto& m : c.models) {
    for (int k = 0; k < c.instances; ++k) {
      const Point q = m.random_point(c.rng);
      const Point x = k % 3 == 0 ? cut_point(m, q, c) : m.random_point(c.rng);
      const LinearityReport r = linearity_report(squared_distance_field(m, x), q, 16, c.sched);
      noisy += r.noisy;
      if ((r.gap > 0.01) != m.in_cut_locus_plus(q, x)) ++mismatches;
    }
  }
  return {"linearity-dichotomy", "D_q d_x^2 is linear exactly when q is not a cut point of x",
          mismatches == 0, std::to_string(mismatches) + " mismatches", noisy};
}

Check integral_linearity(Ctx& c) {
  bool ok = true;
  double worst = 0.0;
  int noisy = 0;
  for (const auto& m : c.models) {
    for (int k = 0; k < c.instances / 4 + 1; ++k) {
      const Point q = m.random_point(c.rng);
      std::vector<Point> atoms;
      const int n_cut = m.kind() == ManifoldKind::FlatTorus ? 2 : 1;
      for (int i = 0; i < n_cut; ++i) atoms.push_back(cut_point(m, q, c));
      for (int i = 0; i < 3; ++i) atoms.push_back(clear_point(m, q, c));
      std::vector<double> w;
      for (std::size_t i = 0; i < atoms.size(); ++i) w.push_back(uniform(c, 0.1, 1.0));
      const FrechetProblem prob(make_measure(m, atoms, w), 2.0);
      const LinearityReport whole = linearity_report(frechet_field(prob), q, 16, c.sched);
      noisy += whole.noisy;
      double sum = 0.0, largest = 0.0;
      for (std::size_t i = 0; i < prob.measure.size(); ++i) {
        if (!m.in_cut_locus_plus(q, prob.measure.atoms()[i])) continue;
        const double g = prob.measure.weights()[i] *
                         linearity_gap(squared_distance_field(m, prob.measure.atoms()[i]), q, 16, c.sched);
        sum += g;
        largest = std::max(largest, g);
      }
      ok = ok && whole.gap <= sum + 1e-4 && whole.gap >= largest - 1e-4;
      worst = std::max({worst, whole.gap - sum, largest - whole.gap});
    }
  }
  return {"integral-linearity", "the nonlinearity of D_q F is the weighted nonlinearity of its cut atoms",
          ok, "max bound excess " + fmt(worst), noisy};
}

Check semiconcavity_bound(Ctx& c) {
  const ManifoldModel s = ManifoldModel::sphere(2);
  const ManifoldModel t = ManifoldModel::flat_torus(2);
  double sphere_max = -std::numeric_limits<double>::infinity(), torus_err = 0.0;
  for (int k = 0; k < c.instances; ++k) {
    const Point q = s.random_point(c.rng), x = s.random_point(c.rng);
    sphere_max = std::max(sphere_max, semiconcavity_estimate(squared_distance_field(s, x), q, 0.3, 100, 1e-3, c.rng()));
    const Point x2 = t.random_point(c.rng);
    const Point q2 = t.exp(t.random_unit_tangent(x2, c.rng).scaled(uniform(c, 0.0, 1.0)));
    torus_err = std::max(torus_err, std::abs(semiconcavity_estimate(squared_distance_field(t, x2), q2, 0.3, 50, 1e-3, c.rng()) - 2.0));
  }
  const FrechetProblem prob = random_problem(s, s.random_point(c.rng), c, 8);
  sphere_max = std::max(sphere_max, semiconcavity_estimate(frechet_field(prob), s.random_point(c.rng), 0.3, 200, 1e-3, c.rng()));
  return {"semiconcavity-bound", "d_x^2 and F are 2-concave on the sphere; d_x^2 has Hessian 2 I on flat tori",
          sphere_max <= 2.0 + 1e-4 && torus_err <= 1e-6,
          "sphere max " + fmt(sphere_max) + ", torus |b - 2| " + fmt(torus_err), 0};
}

Check zero_differential(Ctx& c) {
  bool ok = true;
  double worst = 0.0;
  int noisy = 0;
  const auto battery = mean_battery();
  for (std::size_t k = 0; k < battery.size(); k += 3) {
    const auto& prob = battery[k].problem;
    const MeanResult r = brute_force_mean(prob, default_grid_resolution(prob.manifold()) / 2).refined;
    const LinearityReport lin = linearity_report(frechet_field(prob), r.mean, 16, c.sched);
    noisy += lin.noisy;
    ok = ok && r.converged && r.grad_norm < 1e-9 && lin.gap < c.gap_tol;
    worst = std::max(worst, lin.gap);
  }
  return {"zero-differential", "the differential of F at a mean is linear and zero", ok,
          "max linearity gap " + fmt(worst), noisy};
}

Check barrier_additivity(Ctx& c) {
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  BarrierParams bp;
  bp.validation_size = 2000;
  for (const auto& m : {ManifoldModel::sphere(2), ManifoldModel::flat_torus(2)}) {
    for (int k = 0; k < 3; ++k) {
      const Point q = m.random_point(c.rng);
      const ScalarField f1 = squared_distance_field(m, clear_point(m, q, c, 0.5));
      const ScalarField f2 = squared_distance_field(m, clear_point(m, q, c, 0.5));
      bp.seed = c.rng();
      const double t1 = barrier_certificate_search(f1, q, 0.0, 0.2, bp).trace;
      const double t2 = barrier_certificate_search(f2, q, 0.0, 0.2, bp).trace;
      const double t12 = barrier_certificate_search(sum_field(f1, f2), q, 0.0, 0.2, bp).trace;
      ok = ok && t12 <= t1 + t2 + 1e-6;
      worst = std::max(worst, t12 - t1 - t2);
    }
  }
  return {"barrier-additivity", "barrier Laplacian bounds add over sums of functions", ok,
          "max trace(f1+f2) - trace(f1) - trace(f2) " + fmt(worst), 0};
}

Check barrier_semiconcavity(Ctx& c) {
  bool ok = true;
  std::string detail;
  BarrierParams bp;
  bp.validation_size = 2000;
  for (const auto& m : {ManifoldModel::sphere(2), ManifoldModel::flat_torus(2)}) {
    const Point q = m.random_point(c.rng);
    const ScalarField f = squared_distance_field(m, clear_point(m, q, c, 0.5));
    const double b = semiconcavity_estimate(f, q, 0.05, 400, 1e-3, c.rng());
    const double C = b * m.dim() + 0.1;
    bp.seed = c.rng();
    const BarrierCertificate cert = barrier_certificate_search(f, q, C, 0.05, bp);
    ok = ok && cert.success;
    detail += m.name() + ": b " + fmt(b) + ", trace " + fmt(cert.trace) + "; ";
  }
  return {"barrier-semiconcavity", "a b-concave function has barriers with Laplacian below any C > b dim",
          ok, detail, 0};
}

Check barrier_squares(Ctx& c) {
  bool ok = true;
  std::string detail;
  BarrierParams bp;
  bp.validation_size = 2000;
  const std::vector<double> targets{-1.0, -10.0, -100.0};
  for (const auto& m : c.models) {
    const Point q = m.random_point(c.rng);
    const Point x = cut_point(m, q, c);
    bp.seed = c.rng();
    const BarrierProfile pd = barrier_divergence_profile(distance_field(m, x), q, targets, radius_schedule(), bp);
    const BarrierProfile p2 = barrier_divergence_profile(squared_distance_field(m, x), q, targets, radius_schedule(), bp);
    ok = ok && (!pd.minus_infinity_evidence || p2.minus_infinity_evidence) && pd.minus_infinity_evidence;
    detail += m.name() + ": d_x " + (pd.minus_infinity_evidence ? "yes" : "no") + ", d_x^2 " +
              (p2.minus_infinity_evidence ? "yes" : "no") + "; ";
  }
  return {"barrier-squares", "minus-infinity barrier evidence for d_x at a cut point carries over to d_x^2",
          ok, detail, 0};
}

Check barrier_minima(Ctx& c) {
  (void)c;
  bool ok = true;
  std::string detail;
  BarrierParams bp;
  bp.validation_size = 2000;
  const auto battery = mean_battery();
  for (std::size_t k : {0u, 8u, 15u}) {
    const auto& prob = battery[k].problem;
    const MeanResult r = brute_force_mean(prob, default_grid_resolution(prob.manifold()) / 2).refined;
    const BarrierProfile p = barrier_divergence_profile(frechet_field(prob), r.mean, {-0.1}, radius_schedule(0.5, 4), bp);
    ok = ok && !p.rows.front().success;
    detail += battery[k].name + ": least trace " + fmt(p.envelopes.back().trace) + "; ";
  }
  return {"barrier-minima", "no barrier with negative Laplacian touches F at a minimum", ok, detail, 0};
}

Check median_on_atom(Ctx& c) {
  (void)c;
  const ManifoldModel m = ManifoldModel::circle();
  const FrechetProblem prob(make_measure(m, {m.point({-1.0}), m.point({0.0}), m.point({1.0})}, {1, 1, 1}), 1.0);
  const MeanResult r = p_mean(prob, m.point({0.4}));
  const bool ok = r.converged && std::abs(r.mean.coords[0]) <= 1e-12 &&
                  std::abs(r.atom_at_mean_mass - 1.0 / 3.0) <= 1e-12;
  return {"median-on-atom", "a p = 1 mean may sit on an atom", ok,
          "median " + fmt(r.mean.coords[0]) + ", atom mass " + fmt(r.atom_at_mean_mass), 0};
}

}  // namespace

RunRecord run_lemma_suite_impl(const ScenarioConfig& cfg) {
  RunRecord rec;
  rec.scenario = cfg.scenario();
  rec.config_hash = cfg.hash();
  // A supplied measure is validated first; a malformed one is a plumbing error, not a failed check.
  if (cfg.has_measure()) {
    const LoadedMeasure lm = cfg.measure(cfg.manifold(ManifoldModel::circle()));
    rec.warnings = lm.warnings;
  }
  const double inst = cfg.number("suite", "instances", 40);
  require(inst >= 4 && inst == std::floor(inst), ErrorCode::InvalidInput,
          "suite.instances must be an integer >= 4");
  Ctx c{std::mt19937_64(cfg.seed().value_or(1)), cfg.schedule(), static_cast<int>(inst),
        cfg.number("checks", "gap_tol", 1e-5)};

  rec.checks.push_back(measure_invariants(c));
  rec.checks.push_back(symmetrized_nonpositive(c));
  rec.checks.push_back(quotient_additivity(c));
  rec.checks.push_back(first_variation(c));
  rec.checks.push_back(linearity_dichotomy(c));
  rec.checks.push_back(integral_linearity(c));
  rec.checks.push_back(semiconcavity_bound(c));
  rec.checks.push_back(zero_differential(c));
  rec.checks.push_back(barrier_additivity(c));
  rec.checks.push_back(barrier_semiconcavity(c));
  rec.checks.push_back(barrier_squares(c));
  rec.checks.push_back(barrier_minima(c));
  rec.checks.push_back(median_on_atom(c));

  int noisy = 0;
  Json table = Json::array();
  for (const auto& ch : rec.checks) {
    noisy += ch.noisy;
    table.push_back({{"check", ch.name}, {"citation", ch.citation}, {"passed", ch.passed}, {"noisy", ch.noisy}});
  }
  rec.payload = {{"instances", c.instances},
                 {"confidence_tol", c.sched.confidence_tol},
                 {"noisy_probes", noisy},
                 {"conformance", table}};
  return rec;
}

}  // namespace frechet
