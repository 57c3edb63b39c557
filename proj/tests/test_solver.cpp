#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "frechet/error.hpp"
#include "frechet/solver.hpp"

using namespace frechet;
namespace {

constexpr double kPi = std::numbers::pi;

AtomMeasure on_circle(std::vector<double> angles, std::vector<double> weights) {
  const auto c = ManifoldModel::circle();
  std::vector<Point> pts;
  for (double a : angles) pts.push_back(c.point({a}));
  return make_measure(c, pts, weights);
}

// Oracle: F^(1) on the circle minimized by a fine exhaustive scan.
double scan_median(const std::vector<double>& angles, const std::vector<double>& weights, int n) {
  double best = 0.0, best_v = INFINITY;
  for (int k = 0; k < n; ++k) {
    const double t = -kPi + 2 * kPi * k / n;
    double v = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) v += weights[i] * std::abs(wrap_angle(t - angles[i]));
    if (v < best_v) {
      best_v = v;
      best = t;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("frechet_value examples") {
  const FrechetProblem pm(on_circle({kPi / 2, -kPi / 2}, {1, 1}));
  CHECK(frechet_value(pm, pm.manifold().point({0.0})) == doctest::Approx(kPi * kPi / 4).epsilon(1e-15));
  const auto c = ManifoldModel::circle();
  for (double p : {1.0, 2.0, 3.5})
    CHECK(frechet_value(FrechetProblem(on_circle({0.4}, {1}), p), c.point({0.4})) == 0.0);
  const auto s = ManifoldModel::sphere(2);
  CHECK(frechet_value(FrechetProblem(equator_lattice(s, 100)), s.point({0.0, 0.0, 1.0})) ==
        doctest::Approx(kPi * kPi / 4).epsilon(1e-14));
  CHECK_THROWS_AS(FrechetProblem(on_circle({0.0}, {1}), 0.5), Error);
}

TEST_CASE("frechet_difference examples") {
  const FrechetProblem pm(on_circle({kPi / 2, -kPi / 2}, {1, 1}));
  const auto& c = pm.manifold();
  CHECK(frechet_difference(pm, c.point({0.7}), c.point({0.7})) == 0.0);
  CHECK(std::abs(frechet_difference(pm, c.point({kPi}), c.point({0.0}))) < 1e-15);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const Point a = c.random_point(rng), b = c.random_point(rng);
    CHECK(std::abs(frechet_difference(pm, a, b) + frechet_difference(pm, b, a)) <= 1e-12);
    CHECK(frechet_difference(pm, a, b) ==
          doctest::Approx(frechet_value(pm, a) - frechet_value(pm, b)).epsilon(1e-12));
  }
}

TEST_CASE("gradient examples") {
  const FrechetProblem pm(on_circle({kPi / 2, -kPi / 2}, {1, 1}));
  const GradientResult g = gradient(pm, pm.manifold().point({0.0}));
  CHECK(g.direction.norm() == 0.0);
  CHECK_FALSE(g.multivalued);

  const auto s = ManifoldModel::sphere(2);
  const Point x = s.point({0.0, 0.0, 1.0}), q = s.point({1.0, 0.0, 0.0});
  const FrechetProblem one(make_measure(s, {x}, {1}));
  const GradientResult gs = gradient(one, q);
  CHECK(gs.direction.norm() == doctest::Approx(kPi).epsilon(1e-14));
  CHECK((s.embed(gs.direction) - Eigen::Vector3d(0, 0, kPi)).norm() < 1e-14);
  // F decreases along G at rate |G|^2 / |G|: finite-difference cross-check.
  const TangentVector u = gs.direction.scaled(1.0 / gs.direction.norm());
  const double h = 1e-6;
  const double fd = (frechet_value(one, s.exp(u.scaled(h))) - frechet_value(one, s.exp(u.scaled(-h)))) / (2 * h);
  CHECK(fd == doctest::Approx(-kPi).epsilon(1e-6));

  const auto t = ManifoldModel::flat_torus(2);
  const FrechetProblem corner(make_measure(t, {t.point({kPi, kPi})}, {1}));
  const GradientResult gc = gradient(corner, t.point({0.0, 0.0}));
  CHECK(gc.multivalued);
  CHECK(gc.direction.norm() == doctest::Approx(2 * kPi * std::sqrt(2.0)));
  // Tie-break seed picks among equally short preimages.
  for (std::uint64_t seed : {1u, 2u, 3u, 4u})
    CHECK(gradient(corner, t.point({0.0, 0.0}), kDefaultCutTol, seed).direction.norm() ==
          doctest::Approx(gc.direction.norm()));

  const FrechetProblem med(on_circle({-0.3, 0.0, 0.3}, {1, 1, 1}), 1.0);
  try {
    gradient(med, med.manifold().point({0.0}));
    FAIL("expected atom-at-query");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AtomAtQuery);
  }
}

TEST_CASE("gradient descent examples") {
  const auto s = ManifoldModel::sphere(2);
  const Point x = s.point({0.3, -0.2, 0.9});
  const FrechetProblem one(make_measure(s, {x}, {1}));
  SolverParams tight;
  tight.grad_tolerance = 1e-11;
  const MeanResult r1 = gradient_descent_mean(one, s.point({-0.5, 0.5, 0.1}), tight);
  CHECK(r1.converged);
  CHECK(r1.grad_norm < 1e-10);
  CHECK(s.distance(r1.mean, x) < 1e-10);

  const FrechetProblem pm(on_circle({kPi / 2, -kPi / 2}, {1, 1}));
  const MeanResult r2 = gradient_descent_mean(pm, pm.manifold().point({0.3}));
  CHECK(r2.converged);
  CHECK(std::abs(r2.mean.coords[0]) < 1e-9);
  CHECK(r2.value == doctest::Approx(kPi * kPi / 4).epsilon(1e-12));

  const FrechetProblem eq(equator_lattice(s, 100));
  const MeanResult r3 = gradient_descent_mean(eq, s.point({0.1, 0.0, 1.0}));
  CHECK(r3.converged);
  CHECK(s.distance(r3.mean, s.point({0.0, 0.0, 1.0})) < 1e-6);
  const BruteForceResult bf = brute_force_mean(eq, 40);
  CHECK(std::abs(bf.refined.value - r3.value) < 1e-12);

  // Cut-mass profile is monotone in epsilon.
  for (std::size_t k = 1; k < r3.cut_mass.profile.size(); ++k)
    CHECK(r3.cut_mass.profile[k].second >= r3.cut_mass.profile[k - 1].second);
}

TEST_CASE("solver parameters are validated") {
  const FrechetProblem pm(on_circle({0.0}, {1}));
  const Point q = pm.manifold().point({1.0});
  SolverParams p;
  p.step = 0.0;
  CHECK_THROWS_AS(gradient_descent_mean(pm, q, p), Error);
  p = {};
  p.step = 1.5;
  CHECK_THROWS_AS(gradient_descent_mean(pm, q, p), Error);
  p = {};
  p.grad_tolerance = 0.0;
  CHECK_THROWS_AS(gradient_descent_mean(pm, q, p), Error);
  p = {};
  p.max_iterations = 3;
  p.grad_tolerance = 1e-300;
  const MeanResult r = gradient_descent_mean(pm, q, p);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
}

TEST_CASE("brute force oracle") {
  const auto c = ManifoldModel::circle();
  const FrechetProblem one(on_circle({1.2}, {1}));
  CHECK(std::abs(brute_force_mean(one, 720).refined.mean.coords[0] - 1.2) < 1e-9);

  const FrechetProblem pm(on_circle({kPi / 2, -kPi / 2}, {1, 1}));
  const BruteForceResult bf = brute_force_mean(pm, 720);
  CHECK(bf.grid_minimum.coords[0] == 0.0);
  REQUIRE(bf.near_ties.size() == 2);
  CHECK(c.distance(bf.near_ties[0].mean, c.point({0.0})) < 1e-9);
  CHECK(c.distance(bf.near_ties[1].mean, c.point({kPi})) < 1e-9);
  for (const auto& t : bf.near_ties) CHECK(t.value == doctest::Approx(kPi * kPi / 4).epsilon(1e-12));

  const auto s = ManifoldModel::sphere(2);
  const BruteForceResult be = brute_force_mean(FrechetProblem(equator_lattice(s, 100)), 60);
  REQUIRE(be.near_ties.size() == 2);
  const double z0 = be.near_ties[0].mean.coords[2], z1 = be.near_ties[1].mean.coords[2];
  CHECK(std::abs(std::abs(z0) - 1.0) < 1e-12);
  CHECK(z0 * z1 < 0.0);
}

TEST_CASE("oracle consistency and minimizer agreement") {
  std::mt19937_64 rng(32);
  for (const auto& m : {ManifoldModel::circle(), ManifoldModel::sphere(2), ManifoldModel::flat_torus(2)}) {
    const AtomMeasure mu = sample_measure({SamplerKind::WrappedGaussian, rng(), 50, std::nullopt, 0.5}, m);
    const FrechetProblem prob(mu);
    const int res = m.dim() == 1 ? 720 : 40;
    const BruteForceResult bf = brute_force_mean(prob, res);
    CHECK(bf.refined.value <= bf.grid_value + 2 * m.diameter() * bf.covering_radius);
    CHECK(bf.refined.value <= bf.grid_value + 1e-12);

    const Grid g = m.grid(res);
    auto argmin = [&](auto&& fn) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < g.points.size(); ++k)
        if (fn(g.points[k]) < fn(g.points[best])) best = k;
      return best;
    };
    const std::size_t by_value = argmin([&](const Point& q) { return frechet_value(prob, q); });
    for (int k = 0; k < 5; ++k) {
      const Point q0 = m.random_point(rng);
      CHECK(argmin([&](const Point& q) { return frechet_difference(prob, q, q0); }) == by_value);
    }
  }
}

TEST_CASE("cut mass") {
  const auto s = ManifoldModel::sphere(2);
  const Point n = s.point({0.0, 0.0, 1.0});
  const FrechetProblem near(make_measure(s, {s.point({0.1, 0.0, 1.0}), s.point({0.0, 0.2, 1.0})}, {1, 1}));
  for (const auto& [eps, mass] : cut_mass(near, n, {1e-6, 0.1, 0.2}).profile) CHECK(mass == 0.0);

  const auto c = ManifoldModel::circle();
  const FrechetProblem anti(on_circle({kPi}, {1}));
  const CutMassProfile cm = cut_mass(anti, c.point({0.0}), {1e-6, 0.025, 0.05, 0.1, 0.2});
  CHECK(cm.exact_mass == 1.0);
  for (const auto& [eps, mass] : cm.profile) CHECK(mass == 1.0);

  CHECK_THROWS_AS(cut_mass(anti, c.point({0.0}), {0.1, 0.05}), Error);
  CHECK_THROWS_AS(cut_mass(anti, c.point({0.0}), {0.0, 0.05}), Error);
  CHECK_THROWS_AS(cut_mass(anti, c.point({0.0}), {}), Error);
}

TEST_CASE("p-means") {
  const auto c = ManifoldModel::circle();
  const FrechetProblem two(on_circle({0.3, 1.1, -0.4}, {1, 2, 3}));
  const MeanResult a = p_mean(two, c.point({0.5}));
  const MeanResult b = gradient_descent_mean(two, c.point({0.5}));
  CHECK(a.mean.coords[0] == b.mean.coords[0]);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);

  const FrechetProblem med(on_circle({-0.3, 0.0, 0.3}, {1, 1, 1}), 1.0);
  const MeanResult r = p_mean(med, c.point({0.2}));
  CHECK(r.converged);
  CHECK(std::abs(r.mean.coords[0]) <= 1e-12);
  CHECK(r.atom_at_mean_mass == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.mean.coords[0] == doctest::Approx(scan_median({-0.3, 0.0, 0.3}, {1, 1, 1}, 20000)).epsilon(1e-3));
  CHECK_FALSE(r.le_barden_regime);

  // Median off the atoms: weights push it into an interval.
  const FrechetProblem p15(on_circle({-1.0, 1.0}, {1, 1}), 1.5);
  const MeanResult r15 = p_mean(p15, c.point({0.2}));
  CHECK(r15.converged);
  CHECK(std::abs(r15.mean.coords[0]) < 1e-8);
}

TEST_CASE("exact circle median matches an exhaustive scan") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> ang(-kPi, kPi), wt(0.1, 1.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(5), w(5);
    for (int i = 0; i < 5; ++i) {
      a[i] = ang(rng);
      w[i] = wt(rng);
    }
    const CircleMedian med = exact_circle_median(a, w);
    auto value = [&](double t) {
      double v = 0.0;
      for (int i = 0; i < 5; ++i) v += w[i] * std::abs(wrap_angle(t - a[i]));
      return v;
    };
    CHECK(med.value <= value(scan_median(a, w, 20000)) + 1e-12);
    CHECK(med.second_value >= med.value);
  }
}

TEST_CASE("Le-Barden search") {
  const LeBardenExample ex = find_le_barden_example(100);
  CHECK(ex.measure.size() == 4);
  CHECK(ex.mean.atom_at_mean_mass > 0.0);
  CHECK(ex.mean.cut_mass.exact_mass > 0.0);
  CHECK(ex.mean.le_barden_regime);
  const auto& c = ex.measure.manifold();
  const Point anti = c.antipode(ex.mean.mean);
  bool antipode_weighted = false;
  for (const auto& a : ex.measure.atoms()) antipode_weighted = antipode_weighted || c.distance(a, anti) < 1e-9;
  CHECK(antipode_weighted);

  std::vector<double> angles, weights(ex.measure.weights().begin(), ex.measure.weights().end());
  for (const auto& a : ex.measure.atoms()) angles.push_back(a.coords[0]);
  const double scanned = scan_median(angles, weights, 10000);
  CHECK(std::abs(wrap_angle(scanned - ex.mean.mean.coords[0])) <= 2 * kPi / 10000);

  CHECK_THROWS_AS(find_le_barden_example(50), Error);
  try {
    find_le_barden_example(100, 10);
    FAIL("expected budget exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SearchBudgetExhausted);
  }
}
