#pragma once

#include <cstdint>
#include <vector>

#include "frechet/probes.hpp"

namespace frechet {

struct BarrierParams {
  int sample_size = 2000;        // radial-dense fitting sample
  int validation_size = 10000;   // independent uniform sample for the margin check
  int refine_rounds = 6;         // re-solves with violating validation points added
  double slack = 1e-9;           // fit h >= f + slack |u|^2 so the margin is strictly positive
  double bound = 1e6;            // box on the coefficients of l and Q
  std::uint64_t seed = 0;

  void validate(int dim) const;
};

/// Upper barrier h(y) = f(q) + l(u) + <Q u, u> / 2 with u = log_q y, certified on a finite sample.
struct BarrierCertificate {
  Point center;
  double radius = 0.0;
  double target = 0.0;       // C
  double center_value = 0.0; // f(q) = h(q)
  Eigen::VectorXd linear;
  Eigen::MatrixXd quadratic;
  double trace = 0.0;        // normal-coordinate Laplacian of h at q
  double margin = 0.0;       // min of h - f over fitting and validation samples
  std::size_t sample_size = 0;
  bool success = false;      // trace < C and margin >= -1e-12
};

inline constexpr double kMarginTol = 1e-12;

double barrier_value(const BarrierCertificate& cert, const Eigen::VectorXd& u);

/// Barrier of least trace on B_r(q) (an LP in l and Q), then judged against C.
BarrierCertificate barrier_certificate_search(const ScalarField& f, const Point& q, double target,
                                              double radius, const BarrierParams& params = {});

struct ProfileRow {
  double target = 0.0;
  double best_radius = 0.0;  // largest scheduled radius with a certificate (0 if none)
  double trace = 0.0;        // least trace at best_radius, or at the smallest radius on failure
  bool success = false;
};

struct BarrierProfile {
  std::vector<ProfileRow> rows;
  std::vector<BarrierCertificate> envelopes;  // least-trace barrier per scheduled radius
  bool minus_infinity_evidence = false;       // every tested C certified at some radius
};

/// r_max 2^-k for k = 0..count-1.
std::vector<double> radius_schedule(double r_max = 0.5, int count = 8);

/// Runs the least-trace search over the radius schedule (descending) and reports, for each C
/// (decreasing), the largest radius at which a barrier with trace below C exists.
BarrierProfile barrier_divergence_profile(const ScalarField& f, const Point& q,
                                          const std::vector<double>& targets,
                                          const std::vector<double>& radii = radius_schedule(),
                                          const BarrierParams& params = {});

}  // namespace frechet
