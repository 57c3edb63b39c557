#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "frechet/error.hpp"
#include "frechet/experiment.hpp"

namespace frechet {
namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"", {"scenario", "seed", "manifold", "measure", "auto_fix", "exponent", "solver", "probe",
          "barrier", "checks", "le_barden", "suite", "tolerance_scale", "output"}},
    {"solver", {"step", "max_iterations", "grad_tolerance", "restart_count", "tie_break_seed",
                "cut_tol", "epsilons", "grid_resolution"}},
    {"probe", {"t0", "steps", "extrapolation", "confidence_tol", "directions"}},
    {"barrier", {"targets", "r_max", "radii", "sample_size", "validation_size", "refine_rounds",
                 "seed"}},
    {"measure", {"manifold", "atoms", "weights", "sampler", "dyadic", "equator_lattice"}},
    {"checks", {"ratio_bound", "gap_slack", "sticky_tol", "gap_tol"}},
    {"le_barden", {"resolution", "budget"}},
    {"suite", {"instances"}},
    {"output", {"dir"}},
};

void check_keys(const Json& j, const std::string& section) {
  require(j.is_object(), ErrorCode::InvalidInput,
          (section.empty() ? std::string("config") : "config section '" + section + "'") +
              " must be an object");
  const auto& allowed = kSchema.at(section);
  for (const auto& [key, value] : j.items())
    require(allowed.count(key) > 0, ErrorCode::InvalidInput,
            "unknown config key '" + (section.empty() ? key : section + "." + key) + "'");
}

double as_number(const Json& j, const std::string& what) {
  require(j.is_number(), ErrorCode::InvalidInput, "config value '" + what + "' must be a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& what) {
  const double v = as_number(j, what);
  require(v == std::floor(v) && std::abs(v) < 2e9, ErrorCode::InvalidInput,
          "config value '" + what + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> as_numbers(const Json& j, const std::string& what) {
  require(j.is_array(), ErrorCode::InvalidInput, "config value '" + what + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_number(v, what));
  return out;
}

std::uint64_t as_seed(const Json& j, const std::string& what) {
  require(j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0),
          ErrorCode::InvalidInput, what + " must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& scenario, const Json& tree,
                                     std::optional<std::uint64_t> seed_override) {
  const Json t = tree.is_null() ? Json::object() : tree;
  check_keys(t, "");
  for (const auto& [key, value] : t.items())
    if (kSchema.count(key) && key != "measure") check_keys(value, key);
  if (t.contains("measure")) {
    check_keys(t["measure"], "measure");
    if (t["measure"].contains("sampler")) {
      const Json& s = t["measure"]["sampler"];
      require(s.is_object(), ErrorCode::InvalidInput, "measure.sampler must be an object");
      for (const auto& [key, value] : s.items())
        require(key == "kind" || key == "count" || key == "sigma" || key == "center",
                ErrorCode::InvalidInput, "unknown config key 'measure.sampler." + key + "'");
    }
  }
  if (t.contains("scenario"))
    require(t["scenario"] == scenario, ErrorCode::InvalidInput,
            "config is for scenario '" + t["scenario"].dump() + "', not '" + scenario + "'");

  ScenarioConfig cfg;
  cfg.scenario_ = scenario;
  cfg.tree_ = t;
  if (seed_override) {
    cfg.seed_ = seed_override;
  } else if (t.contains("seed")) {
    cfg.seed_ = as_seed(t["seed"], "seed");
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& scenario, const std::filesystem::path& path,
                                    std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::InvalidInput, "cannot read config file " + path.string());
  Json tree;
  try {
    tree = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "config " + path.string() + ": " + e.what());
  }
  return parse(scenario, tree, seed_override);
}

std::string ScenarioConfig::hash() const {
  Json merged = tree_;
  merged["scenario"] = scenario_;
  if (seed_) merged["seed"] = *seed_;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : merged.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const Json* ScenarioConfig::section(const std::string& name) const {
  return tree_.contains(name) ? &tree_[name] : nullptr;
}

double ScenarioConfig::number(const std::string& sec, const std::string& key, double fallback) const {
  const Json* s = sec.empty() ? &tree_ : section(sec);
  if (!s || !s->contains(key)) return fallback;
  return as_number((*s)[key], sec.empty() ? key : sec + "." + key);
}

ManifoldModel ScenarioConfig::manifold(const ManifoldModel& fallback) const {
  if (tree_.contains("manifold")) return manifold_from_json(tree_["manifold"]);
  if (tree_.contains("measure") && tree_["measure"].contains("manifold"))
    return manifold_from_json(tree_["measure"]["manifold"]);
  return fallback;
}

LoadedMeasure ScenarioConfig::measure(const ManifoldModel& m) const {
  require(has_measure(), ErrorCode::InvalidInput, "config has no measure");
  const Json& j = tree_["measure"];
  const int kinds = j.contains("atoms") + j.contains("sampler") + j.contains("dyadic") +
                    j.contains("equator_lattice");
  require(kinds == 1, ErrorCode::InvalidInput,
          "measure needs exactly one of atoms, sampler, dyadic, equator_lattice");
  const bool auto_fix = tree_.value("auto_fix", false);
  if (j.contains("atoms")) return measure_from_json(j, m, auto_fix);
  if (j.contains("dyadic")) return {dyadic_dirac_measure(m, as_int(j["dyadic"], "measure.dyadic")), {}};
  if (j.contains("equator_lattice"))
    return {equator_lattice(m, as_int(j["equator_lattice"], "measure.equator_lattice")), {}};

  const Json& s = j["sampler"];
  require(seed_.has_value(), ErrorCode::InvalidInput, "seed is mandatory for sampler-based measures");
  SamplerSpec spec;
  spec.seed = *seed_;
  const std::string kind = s.value("kind", "wrapped_gaussian");
  if (kind == "uniform") {
    spec.kind = SamplerKind::UniformGrid;
  } else if (kind == "equator") {
    spec.kind = SamplerKind::UniformSubmanifold;
  } else if (kind == "wrapped_gaussian") {
    spec.kind = SamplerKind::WrappedGaussian;
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown sampler kind '" + kind + "'");
  }
  if (s.contains("count")) spec.count = as_int(s["count"], "measure.sampler.count");
  else spec.count = 1000;
  if (s.contains("sigma")) spec.sigma = as_number(s["sigma"], "measure.sampler.sigma");
  if (s.contains("center")) spec.center = point_from_json(s["center"], m);
  return {sample_measure(spec, m), {}};
}

double ScenarioConfig::exponent(double fallback) const { return number("", "exponent", fallback); }

SolverParams ScenarioConfig::solver() const {
  SolverParams p;
  if (const Json* s = section("solver")) {
    p.step = number("solver", "step", p.step);
    if (s->contains("max_iterations")) p.max_iterations = as_int((*s)["max_iterations"], "solver.max_iterations");
    p.grad_tolerance = number("solver", "grad_tolerance", p.grad_tolerance);
    if (s->contains("restart_count")) p.restart_count = as_int((*s)["restart_count"], "solver.restart_count");
    if (s->contains("tie_break_seed")) p.tie_break_seed = as_seed((*s)["tie_break_seed"], "solver.tie_break_seed");
    p.cut_tol = number("solver", "cut_tol", p.cut_tol);
    if (s->contains("epsilons")) p.epsilons = as_numbers((*s)["epsilons"], "solver.epsilons");
  }
  p.validate();
  return p;
}

int ScenarioConfig::grid_resolution(const ManifoldModel& m) const {
  if (const Json* s = section("solver"); s && s->contains("grid_resolution")) {
    const int r = as_int((*s)["grid_resolution"], "solver.grid_resolution");
    require(r >= 2, ErrorCode::InvalidInput, "solver.grid_resolution must be >= 2");
    return r;
  }
  return default_grid_resolution(m);
}

StepSchedule ScenarioConfig::schedule() const {
  const double t0 = number("probe", "t0", 1e-2);
  const double steps = number("probe", "steps", 9);
  require(steps >= 1 && steps == std::floor(steps), ErrorCode::InvalidInput,
          "probe.steps must be a positive integer");
  StepSchedule s = StepSchedule::geometric(t0, static_cast<int>(steps));
  if (const Json* p = section("probe"); p && p->contains("extrapolation")) {
    const Json& e = (*p)["extrapolation"];
    require(e == "none" || e == "richardson", ErrorCode::InvalidInput,
            "probe.extrapolation must be \"none\" or \"richardson\"");
    s.extrapolation = e == "none" ? Extrapolation::None : Extrapolation::Richardson;
  }
  const double scale = number("", "tolerance_scale", 1.0);
  require(scale > 0.0, ErrorCode::InvalidInput, "tolerance_scale must be > 0");
  s.confidence_tol = number("probe", "confidence_tol", s.confidence_tol) * scale;
  s.validate();
  return s;
}

int ScenarioConfig::directions(const ManifoldModel& m) const {
  const double n = number("probe", "directions", std::max(16, 2 * m.dim()));
  require(n >= 2 * m.dim() && n == std::floor(n), ErrorCode::InvalidInput,
          "probe.directions must be an integer >= 2 * dim");
  return static_cast<int>(n);
}

BarrierParams ScenarioConfig::barrier() const {
  BarrierParams p;
  p.sample_size = static_cast<int>(number("barrier", "sample_size", p.sample_size));
  p.validation_size = static_cast<int>(number("barrier", "validation_size", p.validation_size));
  p.refine_rounds = static_cast<int>(number("barrier", "refine_rounds", p.refine_rounds));
  if (const Json* b = section("barrier"); b && b->contains("seed"))
    p.seed = (*b)["seed"].get<std::uint64_t>();
  else if (seed_)
    p.seed = *seed_;
  return p;
}

std::vector<double> ScenarioConfig::barrier_targets(const std::vector<double>& fallback) const {
  if (const Json* b = section("barrier"); b && b->contains("targets"))
    return as_numbers((*b)["targets"], "barrier.targets");
  return fallback;
}

std::vector<double> ScenarioConfig::barrier_radii() const {
  return radius_schedule(number("barrier", "r_max", 0.5),
                         static_cast<int>(number("barrier", "radii", 8)));
}

}  // namespace frechet
