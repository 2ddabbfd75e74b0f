#pragma once

#include <vector>

#include "nearfield/types.hpp"

namespace nearfield {

/// Degree/order pair of a spherical harmonic; |m| <= l.
struct SphericalBasisIndex {
  int l = 0;
  int m = 0;

  friend bool operator==(const SphericalBasisIndex&, const SphericalBasisIndex&) = default;
};

/// Packed position of (l, m) in coefficient vectors: l*l + l + m.
constexpr int harmonic_index(int l, int m) { return l * l + l + m; }
constexpr int harmonic_count(int lmax) { return (lmax + 1) * (lmax + 1); }
SphericalBasisIndex harmonic_from_index(int index);

// Spherical Bessel functions. All throw std::domain_error for x <= 0 or l < 0.
// j_l uses downward (Miller) recurrence normalised against j_0 or j_1 when l > x,
// and upward recurrence otherwise; y_l always uses upward recurrence.
double spherical_bessel_j(int l, double x);
double spherical_bessel_y(int l, double x);
double spherical_bessel_j_derivative(int l, double x);
double spherical_bessel_y_derivative(int l, double x);
cdouble spherical_hankel1(int l, double x);
cdouble spherical_hankel1_derivative(int l, double x);

/// j_l, y_l and their derivatives for every degree 0..lmax at a single argument.
struct BesselTable {
  std::vector<double> j;
  std::vector<double> dj;
  std::vector<double> y;
  std::vector<double> dy;

  cdouble h(int l) const { return {j[l], y[l]}; }
  cdouble dh(int l) const { return {dj[l], dy[l]}; }
};

BesselTable spherical_bessel_table(int lmax, double x);

/// j_0..j_lmax only (no Neumann functions; safe for tiny x).
std::vector<double> spherical_bessel_j_array(int lmax, double x);

/// Orthonormal complex spherical harmonic with Condon-Shortley phase.
/// Throws std::out_of_range when |m| > l.
cdouble spherical_harmonic(int l, int m, double theta, double phi);

/// Theta part N_lm P_l^m(cos theta) for all 0 <= m <= l <= lmax, packed by
/// harmonic_index(l, m). Negative orders follow from (-1)^m symmetry.
std::vector<double> normalized_legendre_table(int lmax, double theta);

/// All Y_lm(theta, phi) for l <= lmax, packed by harmonic_index.
std::vector<cdouble> spherical_harmonics(int lmax, double theta, double phi);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

}  // namespace nearfield
