#include "frechet/serialize.hpp"

#include <cmath>
#include <sstream>

#include "frechet/error.hpp"

namespace frechet {
namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd vector_from_json(const Json& j, const std::string& what) {
  require(j.is_array(), ErrorCode::InvalidInput, what + " must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    require(j[k].is_number(), ErrorCode::InvalidInput, what + " must be an array of numbers");
    v[k] = j[k].get<double>();
    require(std::isfinite(v[k]), ErrorCode::InvalidInput, what + " must be finite");
  }
  return v;
}

Json matrix_json(const Eigen::MatrixXd& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) rows.push_back(to_vector(a.row(i).transpose()));
  return rows;
}

}  // namespace

Json to_json(const ManifoldModel& m) {
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return {{"kind", "circle"}, {"dim", 1}};
    case ManifoldKind::Sphere:
      return {{"kind", "sphere"}, {"dim", m.dim()}};
    case ManifoldKind::FlatTorus:
      return {{"kind", "flat_torus"}, {"dim", m.dim()}, {"periods", to_vector(m.periods())}};
  }
  return {};
}

ManifoldModel manifold_from_json(const Json& j) {
  if (j.is_string()) return manifold_from_json(Json{{"kind", j}});
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), ErrorCode::InvalidInput,
          "manifold needs a string \"kind\"");
  const std::string kind = j["kind"];
  const int dim = j.value("dim", kind == "circle" ? 1 : 2);
  if (kind == "circle") {
    require(dim == 1, ErrorCode::InvalidInput, "circle has dim 1");
    return ManifoldModel::circle();
  }
  if (kind == "sphere") return ManifoldModel::sphere(dim);
  if (kind == "flat_torus" || kind == "torus") {
    if (j.contains("periods")) {
      const Eigen::VectorXd p = vector_from_json(j["periods"], "torus periods");
      require(!j.contains("dim") || p.size() == dim, ErrorCode::InvalidInput,
              "torus periods disagree with dim");
      return ManifoldModel::flat_torus(p);
    }
    return ManifoldModel::flat_torus(dim);
  }
  throw Error(ErrorCode::InvalidInput, "unknown manifold kind '" + kind + "'");
}

Json to_json(const Point& p, const ManifoldModel& m) {
  return {{"manifold", to_json(m)}, {"coords", to_vector(p.coords)}};
}

Point point_from_json(const Json& j, const ManifoldModel& m) {
  if (j.is_object()) {
    require(j.contains("coords"), ErrorCode::InvalidInput, "point needs \"coords\"");
    if (j.contains("manifold"))
      require(manifold_from_json(j["manifold"]) == m, ErrorCode::InvalidInput,
              "point is tagged with a different manifold");
    return point_from_json(j["coords"], m);
  }
  const Eigen::VectorXd c = vector_from_json(j, "point coordinates");
  require(c.size() == m.coord_dim(), ErrorCode::InvalidInput,
          "point needs " + std::to_string(m.coord_dim()) + " coordinates on " + m.name());
  return m.point(c);
}

Json to_json(const AtomMeasure& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(to_vector(a.coords));
  return {{"manifold", to_json(mu.manifold())},
          {"atoms", atoms},
          {"weights", std::vector<double>(mu.weights().begin(), mu.weights().end())}};
}

LoadedMeasure measure_from_json(const Json& j, bool auto_fix) {
  require(j.is_object() && j.contains("manifold"), ErrorCode::InvalidInput,
          "measure needs a \"manifold\"");
  return measure_from_json(j, manifold_from_json(j["manifold"]), auto_fix);
}

LoadedMeasure measure_from_json(const Json& j, const ManifoldModel& m, bool auto_fix) {
  require(j.is_object() && j.contains("atoms") && j["atoms"].is_array(), ErrorCode::InvalidInput,
          "measure needs an \"atoms\" array");
  if (j.contains("manifold"))
    require(manifold_from_json(j["manifold"]) == m, ErrorCode::InvalidInput,
            "measure is tagged with a different manifold");
  std::vector<std::string> warnings;
  std::vector<Point> atoms;
  for (const auto& a : j["atoms"]) {
    const Eigen::VectorXd c = vector_from_json(a, "atom coordinates");
    require(c.size() == m.coord_dim(), ErrorCode::InvalidInput,
            "atoms need " + std::to_string(m.coord_dim()) + " coordinates on " + m.name());
    if (m.kind() == ManifoldKind::Sphere && std::abs(c.norm() - 1.0) > 1e-9) {
      require(auto_fix, ErrorCode::InvalidInput, "sphere atom is not a unit vector (auto_fix is off)");
      warnings.push_back("renormalized a sphere atom of norm " + std::to_string(c.norm()));
    }
    atoms.push_back(m.point(c));
  }
  std::vector<double> weights;
  if (j.contains("weights")) {
    const Eigen::VectorXd w = vector_from_json(j["weights"], "weights");
    weights = to_vector(w);
  } else {
    weights.assign(atoms.size(), 1.0 / std::max<std::size_t>(1, atoms.size()));
  }
  require(weights.size() == atoms.size(), ErrorCode::InvalidInput,
          "atoms and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0, ErrorCode::InvalidInput, "weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << total << ", not 1";
    require(auto_fix, ErrorCode::InvalidInput, msg.str() + " (auto_fix is off)");
    warnings.push_back(msg.str() + "; normalized");
  }
  const std::size_t n = atoms.size();
  AtomMeasure mu = make_measure(m, std::move(atoms), std::move(weights));
  if (mu.size() != n)
    warnings.push_back("merged duplicate or dropped zero-weight atoms: " + std::to_string(n) +
                       " -> " + std::to_string(mu.size()));
  return {std::move(mu), std::move(warnings)};
}

Json to_json(const CutMassProfile& c) {
  Json rows = Json::array();
  for (const auto& [eps, mass] : c.profile) rows.push_back({{"epsilon", eps}, {"mass", mass}});
  return {{"profile", rows}, {"exact_mass", c.exact_mass}};
}

Json to_json(const MeanResult& r, const ManifoldModel& m) {
  return {{"mean", to_json(r.mean, m)},
          {"value", r.value},
          {"grad_norm", r.grad_norm},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"cut_mass_profile", to_json(r.cut_mass)},
          {"atom_at_mean_mass", r.atom_at_mean_mass},
          {"multivalued", r.multivalued},
          {"le_barden_regime", r.le_barden_regime}};
}

Json to_json(const ProbeReport& r) {
  Json table = Json::array();
  for (const auto& s : r.table)
    table.push_back({{"t", s.t}, {"quotient", s.quotient}, {"extrapolated", s.extrapolated}});
  return {{"value", r.value},
          {"table", table},
          {"residual", r.residual},
          {"monotone", r.monotone},
          {"confidence", to_string(r.confidence)}};
}

Json to_json(const BarrierCertificate& c, const ManifoldModel& m) {
  return {{"center", to_json(c.center, m)},
          {"radius", c.radius},
          {"target", std::isfinite(c.target) ? Json(c.target) : Json(nullptr)},
          {"center_value", c.center_value},
          {"linear", to_vector(c.linear)},
          {"quadratic", matrix_json(c.quadratic)},
          {"trace", c.trace},
          {"margin", c.margin},
          {"sample_size", c.sample_size},
          {"success", c.success}};
}

Json to_json(const BarrierProfile& p, const ManifoldModel& m) {
  Json rows = Json::array();
  for (const auto& r : p.rows)
    rows.push_back({{"target", r.target},
                    {"best_radius", r.best_radius},
                    {"trace", r.trace},
                    {"success", r.success}});
  Json env = Json::array();
  for (const auto& e : p.envelopes) env.push_back(to_json(e, m));
  return {{"rows", rows}, {"envelopes", env}, {"minus_infinity_evidence", p.minus_infinity_evidence}};
}

}  // namespace frechet
