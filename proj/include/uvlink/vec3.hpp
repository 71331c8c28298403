#pragma once

#include <algorithm>
#include <cmath>

namespace uvlink {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a * (1.0 / norm(a)); }

/// Rotates unit vector `dir` by polar cosine `mu` and azimuth `phi` about itself.
inline Vec3 deflect(const Vec3& dir, double mu, double phi) {
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  const double cos_phi = std::cos(phi);
  const double sin_phi = std::sin(phi);
  if (std::abs(dir.z) > 0.99999) {
    const double sign = dir.z > 0.0 ? 1.0 : -1.0;
    return {sin_theta * cos_phi, sin_theta * sin_phi, sign * mu};
  }
  const double denom = std::sqrt(1.0 - dir.z * dir.z);
  return {
      sin_theta * (dir.x * dir.z * cos_phi - dir.y * sin_phi) / denom + dir.x * mu,
      sin_theta * (dir.y * dir.z * cos_phi + dir.x * sin_phi) / denom + dir.y * mu,
      -sin_theta * cos_phi * denom + dir.z * mu,
  };
}

}  // namespace uvlink
