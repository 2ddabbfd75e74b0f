#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace nearfield {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cdouble kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

/// Spherical coordinates of a vector: radius, colatitude in [0, pi], azimuth in (-pi, pi].
struct Spherical {
  double r;
  double theta;
  double phi;
};

inline Spherical to_spherical(const Vec3& v) {
  const double r = v.norm();
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double c = std::clamp(v.z / r, -1.0, 1.0);
  return {r, std::acos(c), std::atan2(v.y, v.x)};
}

inline Vec3 from_spherical(double r, double theta, double phi) {
  const double s = std::sin(theta);
  return {r * s * std::cos(phi), r * s * std::sin(phi), r * std::cos(theta)};
}

/// exp(sign * i k |x - y|) / |x - y|; sign = -1 is the incoming kernel, +1 the outgoing one.
inline cdouble helmholtz_kernel(const Vec3& x, const Vec3& y, double k, int sign) {
  const double r = (x - y).norm();
  return std::polar(1.0 / r, sign * k * r);
}

}  // namespace nearfield
