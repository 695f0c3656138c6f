#include "ionsim/classical.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

#include "ionsim/errors.hpp"

namespace ionsim {

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double length(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Tangent map of the kick: a fixed rotation.
Vec3 kick_tangent(const Vec3& v, double p) {
  const double c = std::cos(p), s = std::sin(p);
  return {v[0] * c + v[2] * s, v[1], -v[0] * s + v[2] * c};
}

// Tangent map of the twist at the pre-twist point `at`. The twist angle depends
// on z, which contributes the last column.
Vec3 twist_tangent(const Vec3& v, const SpherePoint& at, double kappa) {
  const double angle = kappa * at.z;
  const double c = std::cos(angle), s = std::sin(angle);
  const double xr = at.x * c - at.y * s;
  const double yr = at.x * s + at.y * c;
  return {c * v[0] - s * v[1] - kappa * yr * v[2], s * v[0] + c * v[1] + kappa * xr * v[2], v[2]};
}

Vec3 default_tangent(const SpherePoint& pt) {
  // Cross product with whichever axis is least aligned with the point.
  const Vec3 p = pt.as_array();
  Vec3 axis{0.0, 0.0, 0.0};
  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(p[i]) < std::abs(p[k])) k = i;
  }
  axis[k] = 1.0;
  return {p[1] * axis[2] - p[2] * axis[1], p[2] * axis[0] - p[0] * axis[2], p[0] * axis[1] - p[1] * axis[0]};
}

}  // namespace

SpherePoint SpherePoint::from_polar(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double SpherePoint::theta() const { return std::acos(std::clamp(z / norm(), -1.0, 1.0)); }

double SpherePoint::phi() const {
  const double a = std::atan2(y, x);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

double SpherePoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

SpherePoint SpherePoint::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericError("SpherePoint: cannot normalize");
  return {x / n, y / n, z / n};
}

SpherePoint kick(const SpherePoint& pt, double p) {
  const double c = std::cos(p), s = std::sin(p);
  return {pt.x * c + pt.z * s, pt.y, -pt.x * s + pt.z * c};
}

SpherePoint twist(const SpherePoint& pt, double kappa) {
  const double angle = kappa * pt.z;
  const double c = std::cos(angle), s = std::sin(angle);
  return {pt.x * c - pt.y * s, pt.x * s + pt.y * c, pt.z};
}

SpherePoint classical_step(const SpherePoint& pt, const ClassicalParams& params) {
  if (params.order == MapOrder::kKickThenTwist) {
    return twist(kick(pt, params.p), params.kappa).normalized();
  }
  return kick(twist(pt, params.kappa), params.p).normalized();
}

std::vector<SpherePoint> classical_trajectory(const SpherePoint& pt, const ClassicalParams& params,
                                              int steps) {
  if (steps < 0) throw std::invalid_argument("classical_trajectory: negative step count");
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(pt.normalized());
  for (int i = 0; i < steps; ++i) out.push_back(classical_step(out.back(), params));
  return out;
}

double lyapunov_estimate(const SpherePoint& pt, const ClassicalParams& params, int steps,
                         std::optional<Vec3> tangent) {
  if (steps < 1) throw std::invalid_argument("lyapunov_estimate: need at least one step");
  SpherePoint x = pt.normalized();
  Vec3 v = tangent.value_or(default_tangent(x));
  {
    const Vec3 p = x.as_array();
    const double given = length(v);
    const double along = dot(v, p);
    for (int i = 0; i < 3; ++i) v[i] -= along * p[i];
    const double n = length(v);
    // A remnant at rounding level carries no direction.
    if (!(n > 1e-12 * given)) throw std::invalid_argument("lyapunov_estimate: tangent is parallel to the point");
    for (double& c : v) c /= n;
  }

  double sum = 0.0;
  for (int step = 0; step < steps; ++step) {
    if (params.order == MapOrder::kKickThenTwist) {
      const SpherePoint kicked = kick(x, params.p);
      v = twist_tangent(kick_tangent(v, params.p), kicked, params.kappa);
      x = twist(kicked, params.kappa).normalized();
    } else {
      v = kick_tangent(twist_tangent(v, x, params.kappa), params.p);
      x = kick(twist(x, params.kappa), params.p).normalized();
    }
    const Vec3 p = x.as_array();
    const double along = dot(v, p);
    for (int i = 0; i < 3; ++i) v[i] -= along * p[i];
    const double n = length(v);
    sum += std::log(n);
    for (double& c : v) c /= n;
  }
  return sum / steps;
}

double coverage_fraction(const std::vector<SpherePoint>& points, int z_bins, int phi_bins) {
  if (z_bins < 1 || phi_bins < 1) throw std::invalid_argument("coverage_fraction: bin counts must be positive");
  std::vector<char> hit(static_cast<std::size_t>(z_bins) * phi_bins, 0);
  for (const SpherePoint& raw : points) {
    const SpherePoint pt = raw.normalized();
    const int iz = std::clamp(static_cast<int>((pt.z + 1.0) * 0.5 * z_bins), 0, z_bins - 1);
    const int ip = std::clamp(static_cast<int>(pt.phi() / (2.0 * std::numbers::pi) * phi_bins), 0, phi_bins - 1);
    hit[static_cast<std::size_t>(iz) * phi_bins + ip] = 1;
  }
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(hit.size());
}

std::vector<LyapunovCell> lyapunov_map(const ClassicalParams& params, int n_theta, int n_phi, int steps) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("lyapunov_map: grid sizes must be positive");
  std::vector<std::future<std::vector<LyapunovCell>>> rows;
  rows.reserve(static_cast<std::size_t>(n_theta));
  for (int it = 0; it < n_theta; ++it) {
    rows.push_back(std::async(std::launch::async, [=] {
      std::vector<LyapunovCell> row;
      const double theta = (it + 0.5) * std::numbers::pi / n_theta;
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = ip * 2.0 * std::numbers::pi / n_phi;
        row.push_back({theta, phi, lyapunov_estimate(SpherePoint::from_polar(theta, phi), params, steps)});
      }
      return row;
    }));
  }
  std::vector<LyapunovCell> out;
  out.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (auto& f : rows) {
    std::vector<LyapunovCell> row = f.get();
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace ionsim
