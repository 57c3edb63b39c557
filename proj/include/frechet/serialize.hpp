#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "frechet/barrier.hpp"
#include "frechet/measure.hpp"
#include "frechet/probes.hpp"
#include "frechet/solver.hpp"

namespace frechet {

using Json = nlohmann::json;

/// {"kind": "circle" | "sphere" | "flat_torus", "dim": d, "periods": [...] (torus only)}
Json to_json(const ManifoldModel& m);
ManifoldModel manifold_from_json(const Json& j);

/// {"manifold": {...}, "coords": [...]} with canonical coordinates.
Json to_json(const Point& p, const ManifoldModel& m);
/// Accepts a tagged point (tag must match `m`) or a bare coordinate array.
Point point_from_json(const Json& j, const ManifoldModel& m);

/// {"manifold": {...}, "atoms": [[...]], "weights": [...]}
Json to_json(const AtomMeasure& mu);

struct LoadedMeasure {
  AtomMeasure measure;
  std::vector<std::string> warnings;
};

/// Validates a serialized measure. Weights whose sum is not 1 within 1e-12 and off-sphere atoms
/// are rejected unless `auto_fix` is set, in which case they are normalized with a warning.
/// Duplicate atoms are always merged, with a warning.
LoadedMeasure measure_from_json(const Json& j, bool auto_fix);
/// Same, with the manifold supplied separately (the "manifold" key is then optional).
LoadedMeasure measure_from_json(const Json& j, const ManifoldModel& m, bool auto_fix);

Json to_json(const CutMassProfile& c);
Json to_json(const MeanResult& r, const ManifoldModel& m);
Json to_json(const ProbeReport& r);
Json to_json(const BarrierCertificate& c, const ManifoldModel& m);
Json to_json(const BarrierProfile& p, const ManifoldModel& m);

}  // namespace frechet
