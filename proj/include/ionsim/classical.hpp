#pragma once

// Classical kicked top: a kick about y followed by a z-twist whose angle is
// proportional to the post-kick z. Points are unit vectors J/j.

#include <array>
#include <optional>
#include <vector>

namespace ionsim {

struct SpherePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  /// (sin theta cos phi, sin theta sin phi, cos theta).
  static SpherePoint from_polar(double theta, double phi);
  double theta() const;
  double phi() const;  // in [0, 2 pi)
  double norm() const;
  SpherePoint normalized() const;
  std::array<double, 3> as_array() const { return {x, y, z}; }
};

enum class MapOrder { kKickThenTwist, kTwistThenKick };

struct ClassicalParams {
  double kappa = 3.0;
  double p = 1.5707963267948966;
  MapOrder order = MapOrder::kKickThenTwist;
};

/// The two isometries, without renormalization.
SpherePoint kick(const SpherePoint& pt, double p);
SpherePoint twist(const SpherePoint& pt, double kappa);

SpherePoint classical_step(const SpherePoint& pt, const ClassicalParams& params);

/// steps + 1 points, the first being the (normalized) start.
std::vector<SpherePoint> classical_trajectory(const SpherePoint& pt, const ClassicalParams& params,
                                              int steps);

/// Mean log stretch per step of a tangent vector carried by the Jacobians of
/// both sub-steps. The tangent is projected back onto the tangent plane and
/// renormalized each step. `tangent` defaults to a fixed direction orthogonal
/// to the start point.
double lyapunov_estimate(const SpherePoint& pt, const ClassicalParams& params, int steps,
                         std::optional<std::array<double, 3>> tangent = std::nullopt);

/// Fraction of equal-area bins (uniform in z and phi) visited by the points.
double coverage_fraction(const std::vector<SpherePoint>& points, int z_bins, int phi_bins);

struct LyapunovCell {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
};

/// Exponents over a midpoint theta grid and a uniform phi grid on [0, 2 pi),
/// theta-major. Rows are computed concurrently.
std::vector<LyapunovCell> lyapunov_map(const ClassicalParams& params, int n_theta, int n_phi, int steps);

}  // namespace ionsim
