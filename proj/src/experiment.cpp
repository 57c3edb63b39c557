#include "frechet/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "frechet/error.hpp"

namespace frechet {

RunRecord run_lemma_suite_impl(const ScenarioConfig& cfg);

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

RunRecord start(const ScenarioConfig& cfg) {
  RunRecord rec;
  rec.scenario = cfg.scenario();
  rec.config_hash = cfg.hash();
  return rec;
}

void add_check(RunRecord& rec, std::string name, std::string citation, bool passed,
               std::string detail, int noisy = 0) {
  rec.checks.push_back({std::move(name), std::move(citation), passed, std::move(detail), noisy});
}

AtomMeasure circle_measure(std::initializer_list<double> angles, std::vector<double> weights) {
  const ManifoldModel c = ManifoldModel::circle();
  std::vector<Point> pts;
  for (double a : angles) pts.push_back(c.point({a}));
  return make_measure(c, std::move(pts), std::move(weights));
}

// Measure from the config, or `fallback` on the fallback manifold when the config has neither.
LoadedMeasure measure_or(const ScenarioConfig& cfg, const ManifoldModel& m,
                         const std::function<AtomMeasure()>& fallback) {
  if (cfg.has_measure()) return cfg.measure(m);
  require(!cfg.tree().contains("manifold"), ErrorCode::InvalidInput,
          "config names a manifold but no measure");
  return {fallback(), {}};
}

// Keeps grid size times atom count bounded for large measures; the grid only seeds descent.
int oracle_resolution(const ScenarioConfig& cfg, const ManifoldModel& m, std::size_t atoms) {
  if (const Json* s = cfg.section("solver"); s && s->contains("grid_resolution"))
    return cfg.grid_resolution(m);
  int res = default_grid_resolution(m);
  const double budget = 4e7;
  while (res > 8) {
    const double pts = std::pow(static_cast<double>(res), m.kind() == ManifoldKind::Sphere && m.dim() == 2 ? 2 : m.dim());
    if (pts * static_cast<double>(atoms) <= budget) break;
    res = res * 3 / 4;
  }
  return res;
}

Json problem_json(const FrechetProblem& prob) {
  Json j = {{"manifold", to_json(prob.manifold())},
            {"exponent", prob.exponent},
            {"atoms", prob.measure.size()}};
  if (prob.measure.size() <= 64) j["measure"] = to_json(prob.measure);
  return j;
}

}  // namespace

bool RunRecord::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

Json RunRecord::deterministic_json() const {
  Json cj = Json::array();
  for (const auto& c : checks)
    cj.push_back({{"name", c.name},
                  {"citation", c.citation},
                  {"passed", c.passed},
                  {"detail", c.detail},
                  {"noisy", c.noisy}});
  return {{"scenario", scenario}, {"config_hash", config_hash}, {"version", version},
          {"payload", payload},   {"checks", cj},                {"warnings", warnings},
          {"ok", ok()}};
}

Json RunRecord::to_json() const {
  Json j = deterministic_json();
  j["wall_time_s"] = wall_time;
  return j;
}

const std::vector<ScenarioInfo>& scenario_list() {
  static const std::vector<ScenarioInfo> list = {
      {"mean", "Frechet means have a vanishing, linear differential and solve the tangent mean equation"},
      {"cut-mass", "a Frechet mean carries no mass on its cut locus; mass near it shrinks with the distance"},
      {"circle-barrier", "pi + C t^2 touches d(-q, .) from above at q with Laplacian 2C < C for every C <= -1/pi"},
      {"nowhere-smooth", "a dyadic sum of Dirac masses gives a Frechet function that is non-differentiable on a dense set"},
      {"sticky", "Frechet means on complete manifolds are not directionally sticky for p > 1"},
      {"pmean", "Frechet p-means, including medians sitting on atoms"},
      {"le-barden", "a p = 1 mean can be an atom whose antipode carries mass"},
      {"lemma-suite", "conformance battery for the nonsmooth calculus of distance and Frechet functions"},
  };
  return list;
}

RunRecord run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& s = cfg.scenario();
  RunRecord rec;
  if (s == "mean") rec = run_mean(cfg);
  else if (s == "cut-mass") rec = run_cut_mass(cfg);
  else if (s == "circle-barrier") rec = run_circle_barrier(cfg);
  else if (s == "nowhere-smooth") rec = run_nowhere_smooth(cfg);
  else if (s == "sticky") rec = run_sticky(cfg);
  else if (s == "pmean") rec = run_pmean(cfg);
  else if (s == "le-barden") rec = run_le_barden(cfg);
  else if (s == "lemma-suite") rec = run_lemma_suite(cfg);
  else throw Error(ErrorCode::InvalidInput, "unknown scenario '" + s + "'");
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

int default_grid_resolution(const ManifoldModel& m) {
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return 2000;
    case ManifoldKind::Sphere:
      return m.dim() == 1 ? 2000 : (m.dim() == 2 ? 60 : 10);
    case ManifoldKind::FlatTorus:
      return m.dim() == 1 ? 2000 : (m.dim() == 2 ? 120 : 16);
  }
  return 16;
}

double oracle_tolerance(const ManifoldModel& m, double p, double covering_radius) {
  return p * std::pow(m.diameter(), p - 1.0) * covering_radius;
}

std::vector<BatteryProblem> mean_battery() {
  const ManifoldModel c = ManifoldModel::circle();
  const ManifoldModel s = ManifoldModel::sphere(2);
  const ManifoldModel t = ManifoldModel::flat_torus(2);
  auto gauss = [](const ManifoldModel& m, std::uint64_t seed, int n, double sigma,
                  std::optional<Point> center = std::nullopt) {
    SamplerSpec spec{SamplerKind::WrappedGaussian, seed, n, std::move(center), sigma};
    return sample_measure(spec, m);
  };
  std::vector<BatteryProblem> out;
  auto add = [&](std::string name, AtomMeasure mu) {
    out.push_back({std::move(name), FrechetProblem(std::move(mu), 2.0)});
  };
  add("circle-two-opposite", circle_measure({kPi / 2, -kPi / 2}, {1, 1}));
  add("circle-single", circle_measure({1.0}, {1}));
  add("circle-three-weighted", circle_measure({-1.0, 0.0, 1.0}, {1, 2, 1}));
  add("circle-gauss-0.3", gauss(c, 101, 200, 0.3));
  add("circle-gauss-0.5", gauss(c, 102, 500, 0.5, c.point({2.0})));
  add("circle-two-unequal", circle_measure({0.5, 2.0}, {0.7, 0.3}));
  add("circle-dyadic-3", dyadic_dirac_measure(c, 3));
  add("sphere-single", make_measure(s, {s.point({0.0, 0.6, 0.8})}, {1}));
  add("sphere-equator-lattice", equator_lattice(s, 100));
  add("sphere-gauss-0.3", gauss(s, 201, 200, 0.3));
  add("sphere-gauss-0.5", gauss(s, 202, 500, 0.5, s.point({1.0, 0.0, 0.0})));
  add("sphere-gauss-0.4", gauss(s, 203, 1000, 0.4, s.point({0.0, -0.6, 0.8})));
  add("sphere-three", make_measure(s, {s.point({0.3, 0.0, 1.0}), s.point({-0.2, 0.3, 1.0}), s.point({0.0, -0.4, 1.0})}, {1, 1, 1}));
  add("sphere-two", make_measure(s, {s.point({1.0, 0.0, 0.0}), s.point({0.0, 1.0, 0.0})}, {0.6, 0.4}));
  add("torus-single", make_measure(t, {t.point({1.0, 5.0})}, {1}));
  add("torus-gauss-0.3", gauss(t, 301, 200, 0.3));
  add("torus-gauss-0.5", gauss(t, 302, 500, 0.5, t.point({3.0, 2.0})));
  add("torus-gauss-0.6", gauss(t, 303, 1000, 0.6, t.point({5.0, 1.0})));
  add("torus-square", make_measure(t, {t.point({0.5, 0.5}), t.point({1.5, 0.5}), t.point({0.5, 1.5}), t.point({1.5, 1.5})}, {1, 2, 3, 4}));
  add("torus-two", make_measure(t, {t.point({1.0, 1.0}), t.point({2.0, 3.0})}, {0.5, 0.5}));
  return out;
}

RunRecord run_mean(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const ManifoldModel m = cfg.manifold(ManifoldModel::circle());
  LoadedMeasure lm = measure_or(cfg, m, [] { return circle_measure({kPi / 2, -kPi / 2}, {1, 1}); });
  rec.warnings = lm.warnings;
  const FrechetProblem prob(lm.measure, cfg.exponent(2.0));
  const SolverParams params = cfg.solver();
  const StepSchedule sched = cfg.schedule();
  const int dirs = cfg.directions(m);
  const int res = oracle_resolution(cfg, m, prob.measure.size());
  const BruteForceResult bf = brute_force_mean(prob, res, params);
  const double oracle_tol = oracle_tolerance(m, prob.exponent, bf.covering_radius);
  const double gap_tol = cfg.number("checks", "gap_tol", 1e-5);
  const ScalarField F = frechet_field(prob);
  const bool smooth_case = prob.exponent > 1.0;

  Json means = Json::array();
  bool converged = true, oracle_ok = true, gap_ok = true, resid_ok = true, cut_ok = true;
  double worst_gap = 0.0, worst_resid = 0.0, worst_oracle = 0.0, worst_grad = 0.0;
  int noisy = 0;
  for (const auto& r : bf.near_ties) {
    Json mj = to_json(r, m);
    const double oracle_gap = std::abs(r.value - bf.grid_value);
    worst_oracle = std::max(worst_oracle, oracle_gap);
    worst_grad = std::max(worst_grad, r.grad_norm);
    converged = converged && r.converged && r.grad_norm < params.grad_tolerance;
    oracle_ok = oracle_ok && oracle_gap <= oracle_tol;
    cut_ok = cut_ok && r.cut_mass.exact_mass == 0.0;
    if (smooth_case) {
      const LinearityReport lin = linearity_report(F, r.mean, dirs, sched);
      const double resid = log_mean(prob, r.mean, params.cut_tol).norm();
      noisy += lin.noisy;
      mj["linearity_gap"] = lin.gap;
      mj["log_residual"] = resid;
      worst_gap = std::max(worst_gap, lin.gap);
      worst_resid = std::max(worst_resid, resid);
      gap_ok = gap_ok && lin.gap < gap_tol;
      resid_ok = resid_ok && (prob.exponent != 2.0 || resid < 1e-9);
    }
    means.push_back(mj);
  }
  rec.payload = {{"problem", problem_json(prob)},
                 {"grid", {{"resolution", res},
                           {"points", bf.near_tie_grid.size()},
                           {"covering_radius", bf.covering_radius},
                           {"minimum", to_json(bf.grid_minimum, m)},
                           {"value", bf.grid_value},
                           {"oracle_tolerance", oracle_tol}}},
                 {"near_tie_count", bf.near_ties.size()},
                 {"means", means}};
  add_check(rec, "descent-converged", "descent reaches a stationary point of the Frechet function",
            converged, "max grad_norm " + fmt(worst_grad));
  add_check(rec, "oracle-agreement", "descent value is within Lipschitz x covering radius of the grid minimum",
            oracle_ok, "max |F - grid min| " + fmt(worst_oracle) + " <= " + fmt(oracle_tol));
  add_check(rec, "no-cut-mass", "no atom lies on the cut locus of a mean", cut_ok, "");
  if (smooth_case)
    add_check(rec, "zero-differential", "the differential of F at a mean is linear and zero",
              gap_ok, "max linearity gap " + fmt(worst_gap), noisy);
  if (prob.exponent == 2.0)
    add_check(rec, "tangent-mean-equation", "sum_i w_i log_mu(x_i) = 0 at a mean", resid_ok,
              "max residual " + fmt(worst_resid));
  return rec;
}

RunRecord run_cut_mass(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const ManifoldModel m = cfg.manifold(ManifoldModel::sphere(2));
  const std::uint64_t seed = cfg.seed().value_or(1);
  const bool sampled = !cfg.has_measure() || cfg.tree()["measure"].contains("sampler");
  LoadedMeasure lm = measure_or(cfg, m, [&] {
    return sample_measure({SamplerKind::WrappedGaussian, seed, 10000, std::nullopt, 1.0}, m);
  });
  rec.warnings = lm.warnings;
  const FrechetProblem prob(lm.measure, cfg.exponent(2.0));
  const SolverParams params = cfg.solver();
  const int res = oracle_resolution(cfg, m, prob.measure.size());
  const MeanResult mean = brute_force_mean(prob, res, params).refined;

  // Minimize F(q) - F(q0) independently: grid argmin of the difference, then descent.
  const Point q0 = prob.measure.atoms()[0];
  const Grid grid = m.grid(res);
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const double v = frechet_difference(prob, grid.points[k], q0);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  const MeanResult diff = gradient_descent_mean(prob, grid.points[best], params);
  const double separation = m.distance(mean.mean, diff.mean);

  const double ratio_bound = cfg.number("checks", "ratio_bound", 1.0);
  const double min_eps = mean.cut_mass.profile.front().first;
  double max_ratio = 0.0;
  CsvTable table{"profile", {"epsilon", "mass", "mass_difference_minimizer", "ratio"}, {}};
  bool same_profile = true;
  for (std::size_t k = 0; k < mean.cut_mass.profile.size(); ++k) {
    const auto [eps, mass] = mean.cut_mass.profile[k];
    const double ratio = mass / eps;
    if (eps > min_eps) max_ratio = std::max(max_ratio, ratio);
    same_profile = same_profile && diff.cut_mass.profile[k].second == mass;
    table.rows.push_back({eps, mass, diff.cut_mass.profile[k].second, ratio});
  }
  rec.tables.push_back(table);
  rec.payload = {{"problem", problem_json(prob)},
                 {"grid_resolution", res},
                 {"mean", to_json(mean, m)},
                 {"difference_minimizer", to_json(diff, m)},
                 {"difference_reference", to_json(q0, m)},
                 {"separation", separation},
                 {"max_ratio", max_ratio}};
  add_check(rec, "descent-converged", "descent reaches a stationary point of the Frechet function",
            mean.converged && diff.converged, "grad_norm " + fmt(mean.grad_norm));
  add_check(rec, "no-cut-mass", "a Frechet mean carries no mass on its cut locus",
            mean.cut_mass.exact_mass == 0.0, "exact mass " + fmt(mean.cut_mass.exact_mass));
  add_check(rec, "difference-minimizer", "F and the Frechet difference F - F(q0) share minimizers",
            separation < 1e-6 && same_profile, "separation " + fmt(separation));
  if (sampled || cfg.number("checks", "ratio_bound", -1.0) > 0.0)
    add_check(rec, "mass-ratio-bounded", "cut-locus mass within epsilon is O(epsilon) at a mean",
              max_ratio <= ratio_bound, "max mass(eps)/eps " + fmt(max_ratio) + " <= " + fmt(ratio_bound));
  return rec;
}

RunRecord run_circle_barrier(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const ManifoldModel c = cfg.manifold(ManifoldModel::circle());
  require(c.kind() == ManifoldKind::Circle, ErrorCode::InvalidInput,
          "circle-barrier runs on the circle only");
  const std::vector<double> targets = cfg.barrier_targets({-1.0 / kPi, -1.0, -10.0});
  for (double C : targets)
    require(C < 0.0, ErrorCode::InvalidInput,
            "circle-barrier targets must be negative (got " + fmt(C) + ")");
  const Point q = c.point({0.0});
  const ScalarField f = distance_field(c, c.antipode(q));
  BarrierParams bp = cfg.barrier();

  constexpr int kSamples = 10001;
  Json rows = Json::array();
  CsvTable margins{"margins", {"C", "t", "h", "f", "margin"}, {}};
  CsvTable traces{"traces", {"C", "radius", "explicit_trace", "explicit_margin", "searched_trace", "searched_margin"}, {}};
  bool all_ok = true;
  std::string detail;
  for (double C : targets) {
    const double R = std::min(-1.0 / C, kPi);
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kSamples; ++k) {
      const double t = -R + 2.0 * R * k / (kSamples - 1);
      const double h = kPi + C * t * t;
      const double fv = f(c.point({t}));
      margin = std::min(margin, h - fv);
      if (k % 50 == 0) margins.rows.push_back({C, t, h, fv, h - fv});
    }
    const double trace = 2.0 * C;
    const BarrierCertificate searched =
        barrier_certificate_search(f, q, C, std::min(R, 0.99 * kPi), bp);
    const bool ok = margin >= -kMarginTol && trace < C && searched.success;
    all_ok = all_ok && ok;
    detail += "C=" + fmt(C) + ": margin " + fmt(margin) + ", trace " + fmt(trace) + "; ";
    traces.rows.push_back({C, R, trace, margin, searched.trace, searched.margin});
    rows.push_back({{"target", C},
                    {"radius", R},
                    {"explicit", {{"center_value", kPi}, {"quadratic", trace}, {"trace", trace},
                                  {"margin", margin}, {"sample_size", kSamples}}},
                    {"searched", to_json(searched, c)},
                    {"success", ok}});
  }
  rec.tables = {margins, traces};
  rec.payload = {{"field", f.label}, {"center", to_json(q, c)}, {"targets", rows}};
  add_check(rec, "explicit-barrier", "pi + C t^2 >= pi - |t| on |t| <= -1/C with Laplacian 2C < C",
            all_ok, detail);
  return rec;
}

RunRecord run_nowhere_smooth(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const ManifoldModel m = cfg.manifold(ManifoldModel::circle());
  int J = 12;
  if (cfg.has_measure()) {
    const Json& j = cfg.tree()["measure"];
    require(j.contains("dyadic") && j.size() <= 2, ErrorCode::InvalidInput,
            "nowhere-smooth needs a dyadic measure {\"dyadic\": J}");
    J = j["dyadic"].get<int>();
  }
  const AtomMeasure mu = dyadic_dirac_measure(m, J);
  const FrechetProblem prob(mu, 2.0);
  const ScalarField F = frechet_field(prob);
  const StepSchedule sched = cfg.schedule();
  const int dirs = cfg.directions(m);
  const double slack = cfg.number("checks", "gap_slack", 0.05);

  std::vector<Point> probed;
  CsvTable table{"gaps", {"j", "weight", "gap", "predicted"}, {}};
  Json rows = Json::array();
  bool gaps_ok = true, decay_ok = true;
  int noisy = 0;
  std::vector<double> gaps;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Point& x = mu.atoms()[j];
    const double w = mu.weights()[j];
    std::vector<Point> cuts;
    double predicted = 4.0 * kPi * w;
    if (m.kind() == ManifoldKind::FlatTorus) {
      predicted = 2.0 * m.periods()[0] * w;
      for (double s : {0.25, 0.6}) {
        Eigen::VectorXd off = Eigen::VectorXd::Zero(m.dim());
        off[0] = 0.5 * m.periods()[0];
        for (int i = 1; i < m.dim(); ++i) off[i] = s * m.periods()[i];
        cuts.push_back(m.point(x.coords + off));
      }
    } else {
      cuts.push_back(m.antipode(x));
    }
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& q : cuts) {
      const LinearityReport lin = linearity_report(F, q, dirs, sched);
      noisy += lin.noisy;
      gap = std::min(gap, lin.gap);
      probed.push_back(q);
    }
    gaps.push_back(gap);
    gaps_ok = gaps_ok && gap >= predicted * (1.0 - slack);
    table.rows.push_back({double(j + 1), w, gap, predicted});
    Json row = {{"j", j + 1}, {"weight", w}, {"gap", gap}, {"predicted", predicted}};
    if (j > 0) {
      const double ratio = gap / gaps[j - 1];
      row["decay_ratio"] = ratio;
      decay_ok = decay_ok && ratio >= 0.45 && ratio <= 0.55;
    }
    rows.push_back(row);
  }
  const Grid ref = m.grid(m.kind() == ManifoldKind::Sphere && m.dim() == 2 ? 40 : (m.dim() == 1 ? 4096 : 64));
  const double cover = covering_radius(m, probed, ref.points);
  rec.tables.push_back(table);
  rec.payload = {{"manifold", to_json(m)},
                 {"J", J},
                 {"gaps", rows},
                 {"probed_points", probed.size()},
                 {"covering_radius_proxy", cover}};
  add_check(rec, "gap-lower-bound", "F is non-differentiable at the cut points of every atom",
            gaps_ok, "gap_j >= predicted_j * " + fmt(1.0 - slack), noisy);
  if (mu.size() >= 2)
    add_check(rec, "geometric-decay", "the nonlinearity at the j-th atom's cut points decays like its weight",
              decay_ok, "consecutive ratios in [0.45, 0.55]");
  return rec;
}

RunRecord run_sticky(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const ManifoldModel m = cfg.manifold(ManifoldModel::circle());
  LoadedMeasure lm = measure_or(cfg, m, [] { return circle_measure({kPi / 2, -kPi / 2}, {1, 1}); });
  rec.warnings = lm.warnings;
  const FrechetProblem prob(lm.measure, cfg.exponent(2.0));
  const SolverParams params = cfg.solver();
  const StepSchedule sched = cfg.schedule();
  const int res = oracle_resolution(cfg, m, prob.measure.size());
  const MeanResult mean = prob.exponent == 1.0
                              ? p_mean(prob, brute_force_mean(prob, res, params).grid_minimum, params)
                              : brute_force_mean(prob, res, params).refined;
  const ScalarField F = frechet_field(prob);
  const auto dirs = probe_directions(m, mean.mean, cfg.directions(m));
  double min_d = std::numeric_limits<double>::infinity();
  int noisy = 0;
  Json table = Json::array();
  for (const auto& v : dirs) {
    const ProbeReport r = directional_derivative(F, mean.mean, v, sched);
    noisy += r.confidence == Confidence::Noisy;
    min_d = std::min(min_d, r.value);
    table.push_back({{"direction", std::vector<double>(v.components.data(), v.components.data() + v.components.size())},
                     {"derivative", r.value},
                     {"confidence", to_string(r.confidence)}});
  }
  const double tol = cfg.number("checks", "sticky_tol", 1e-5);
  const bool nonsticky = min_d <= tol;
  rec.payload = {{"problem", problem_json(prob)},
                 {"mean", to_json(mean, m)},
                 {"min_derivative", min_d},
                 {"verdict", nonsticky ? "nonsticky" : "sticky"},
                 {"atom_at_mean_mass", mean.atom_at_mean_mass},
                 {"directions", table}};
  add_check(rec, "descent-converged", "descent reaches a stationary point of the Frechet function",
            mean.converged, "grad_norm " + fmt(mean.grad_norm));
  if (prob.exponent > 1.0)
    add_check(rec, "nonsticky", "a p > 1 mean has zero one-sided derivative in every direction",
              nonsticky && min_d >= -tol, "min derivative " + fmt(min_d), noisy);
  return rec;
}

RunRecord run_pmean(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const ManifoldModel m = cfg.manifold(ManifoldModel::circle());
  LoadedMeasure lm = measure_or(cfg, m, [] { return circle_measure({-1.0, 0.0, 1.0}, {1, 1, 1}); });
  rec.warnings = lm.warnings;
  const FrechetProblem prob(lm.measure, cfg.exponent(1.0));
  const SolverParams params = cfg.solver();
  const int res = oracle_resolution(cfg, m, prob.measure.size());
  const Grid grid = m.grid(res);
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const double v = frechet_value(prob, grid.points[k]);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  const MeanResult r = p_mean(prob, grid.points[best], params);
  const double tol = oracle_tolerance(m, prob.exponent, grid.covering_radius);
  rec.payload = {{"problem", problem_json(prob)},
                 {"mean", to_json(r, m)},
                 {"grid", {{"resolution", res}, {"value", best_v}, {"oracle_tolerance", tol}}}};
  add_check(rec, "descent-converged", "descent reaches a stationary point of the Frechet p-function",
            r.converged, "stationarity " + fmt(r.grad_norm));
  add_check(rec, "oracle-agreement", "descent value is within Lipschitz x covering radius of the grid minimum",
            std::abs(r.value - best_v) <= tol, "|F - grid min| " + fmt(std::abs(r.value - best_v)));
  return rec;
}

RunRecord run_le_barden(const ScenarioConfig& cfg) {
  RunRecord rec = start(cfg);
  const int res = static_cast<int>(cfg.number("le_barden", "resolution", 100));
  const double budget = cfg.number("le_barden", "budget", 5e7);
  require(budget >= 1, ErrorCode::InvalidInput, "le_barden.budget must be >= 1");
  const ManifoldModel c = ManifoldModel::circle();
  try {
    const LeBardenExample ex = find_le_barden_example(res, static_cast<std::size_t>(budget));
    const FrechetProblem prob(ex.measure, 1.0);
    constexpr int kScan = 10000;
    const Grid scan = c.grid(kScan);
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scan.points.size(); ++k) {
      const double v = frechet_value(prob, scan.points[k]);
      if (v < best_v) {
        best_v = v;
        best = k;
      }
    }
    const double mu = ex.mean.mean.coords[0];
    const double scan_off = std::abs(wrap_angle(scan.points[best].coords[0] - mu));
    std::vector<double> angles, weights(ex.measure.weights().begin(), ex.measure.weights().end());
    for (const auto& a : ex.measure.atoms()) angles.push_back(a.coords[0]);
    const CircleMedian exact = exact_circle_median(angles, weights);
    rec.payload = {{"found", true},
                   {"configurations_tried", ex.configurations_tried},
                   {"measure", to_json(ex.measure)},
                   {"mean", to_json(ex.mean, c)},
                   {"scan", {{"points", kScan}, {"argmin", scan.points[best].coords[0]}, {"value", best_v}}},
                   {"exact_median", {{"theta", exact.theta}, {"value", exact.value}, {"runner_up", exact.second_value}}}};
    add_check(rec, "median-is-atom", "the p = 1 mean is an atom", ex.mean.atom_at_mean_mass > 0.0,
              "atom mass " + fmt(ex.mean.atom_at_mean_mass));
    add_check(rec, "antipode-weighted", "the cut point of the p = 1 mean carries mass",
              ex.mean.cut_mass.exact_mass > 0.0, "cut mass " + fmt(ex.mean.cut_mass.exact_mass));
    add_check(rec, "scan-agrees", "an exhaustive scan of F^(1) attains its minimum at the mean",
              scan_off <= 2.0 * kPi / kScan, "offset " + fmt(scan_off));
    add_check(rec, "exact-median-agrees", "breakpoint enumeration gives the same median",
              std::abs(wrap_angle(exact.theta - mu)) <= 1e-9, "exact theta " + fmt(exact.theta));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SearchBudgetExhausted) throw;
    rec.payload = {{"found", false}, {"status", "budget-exhausted"}, {"message", e.what()},
                   {"budget", budget}};
  }
  return rec;
}

RunRecord run_lemma_suite(const ScenarioConfig& cfg) { return run_lemma_suite_impl(cfg); }

void write_outputs(const RunRecord& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / (rec.scenario + ".jsonl"), std::ios::app);
    require(out.good(), ErrorCode::Resource, "cannot write to " + dir.string());
    out << rec.to_json().dump() << '\n';
  }
  for (const auto& t : rec.tables) {
    std::ofstream out(dir / (rec.scenario + "_" + t.name + ".csv"));
    require(out.good(), ErrorCode::Resource, "cannot write to " + dir.string());
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << '\n';
    out.precision(17);
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  }
}

}  // namespace frechet
