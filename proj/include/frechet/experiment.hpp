#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frechet/barrier.hpp"
#include "frechet/serialize.hpp"
#include "frechet/solver.hpp"

namespace frechet {

inline constexpr const char* kVersion = "0.1.0";

/// Parsed scenario configuration. The tree is the JSON config file with unknown keys rejected;
/// typed accessors fill documented defaults.
class ScenarioConfig {
 public:
  static ScenarioConfig parse(const std::string& scenario, const Json& tree,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
  static ScenarioConfig load(const std::string& scenario, const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

  const std::string& scenario() const { return scenario_; }
  const Json& tree() const { return tree_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  /// FNV-1a 64 of the canonical JSON (sorted keys) of the tree with scenario and seed merged in.
  std::string hash() const;

  ManifoldModel manifold(const ManifoldModel& fallback) const;
  bool has_measure() const { return tree_.contains("measure"); }
  LoadedMeasure measure(const ManifoldModel& m) const;
  double exponent(double fallback) const;
  SolverParams solver() const;
  int grid_resolution(const ManifoldModel& m) const;
  StepSchedule schedule() const;
  int directions(const ManifoldModel& m) const;
  BarrierParams barrier() const;
  std::vector<double> barrier_targets(const std::vector<double>& fallback) const;
  std::vector<double> barrier_radii() const;
  /// Value under section.key, or fallback.
  double number(const std::string& section, const std::string& key, double fallback) const;
  const Json* section(const std::string& name) const;

 private:
  std::string scenario_;
  Json tree_;
  std::optional<std::uint64_t> seed_;
};

struct Check {
  std::string name;
  std::string citation;  // statement the check exercises
  bool passed = false;
  std::string detail;
  int noisy = 0;         // probes flagged Noisy while evaluating the check
};

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct RunRecord {
  std::string scenario;
  std::string config_hash;
  std::string version = kVersion;
  Json payload;
  std::vector<Check> checks;
  std::vector<CsvTable> tables;
  std::vector<std::string> warnings;
  double wall_time = 0.0;

  bool ok() const;
  /// Deterministic part: everything except wall time.
  Json deterministic_json() const;
  Json to_json() const;
};

struct ScenarioInfo {
  std::string name;
  std::string citation;
};

const std::vector<ScenarioInfo>& scenario_list();

RunRecord run_scenario(const ScenarioConfig& cfg);
RunRecord run_mean(const ScenarioConfig& cfg);
RunRecord run_cut_mass(const ScenarioConfig& cfg);
RunRecord run_circle_barrier(const ScenarioConfig& cfg);
RunRecord run_nowhere_smooth(const ScenarioConfig& cfg);
RunRecord run_sticky(const ScenarioConfig& cfg);
RunRecord run_pmean(const ScenarioConfig& cfg);
RunRecord run_le_barden(const ScenarioConfig& cfg);
RunRecord run_lemma_suite(const ScenarioConfig& cfg);

/// Appends the record as one JSON line to <dir>/<scenario>.jsonl and writes
/// <dir>/<scenario>_<table>.csv for each table.
void write_outputs(const RunRecord& rec, const std::filesystem::path& dir);

struct BatteryProblem {
  std::string name;
  FrechetProblem problem;
};

/// Twenty fixed p = 2 problems on the circle, Sphere(2) and FlatTorus(2).
std::vector<BatteryProblem> mean_battery();

/// Default grid resolution for the brute-force oracle on m.
int default_grid_resolution(const ManifoldModel& m);

/// Lipschitz bound p diam^{p-1} times the grid covering radius.
double oracle_tolerance(const ManifoldModel& m, double p, double covering_radius);

}  // namespace frechet
