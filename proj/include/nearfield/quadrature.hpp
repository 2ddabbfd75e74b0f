#pragma once

#include <vector>

#include "nearfield/types.hpp"

namespace nearfield {

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times the
/// uniform trapezoid rule in phi. Exact for harmonics of degree < min(2 n_theta, n_phi).
struct SphereQuadrature {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;    // n_theta colatitudes, increasing
  std::vector<double> gl_weight;  // Gauss weights in cos(theta)
  std::vector<double> phi;      // n_phi azimuths

  int size() const { return n_theta * n_phi; }
  /// Weight of node (i, j) on the unit sphere; the weights sum to 4 pi.
  double weight(int i) const { return gl_weight[i] * 2.0 * kPi / n_phi; }
};

SphereQuadrature make_sphere_quadrature(int n_theta, int n_phi);

/// Rule with at least `min_nodes` points and n_phi = 2 n_theta.
SphereQuadrature sphere_quadrature_with_at_least(int min_nodes);

/// Nodes of a quadrature placed on a sphere of given centre and radius.
struct SurfaceNodes {
  Vec3 center;
  double radius = 0.0;
  SphereQuadrature rule;
  std::vector<Vec3> points;     // flattened (i * n_phi + j)
  std::vector<Vec3> normals;    // outward unit normals
  std::vector<double> weights;  // surface weights, sum = 4 pi radius^2

  int size() const { return static_cast<int>(points.size()); }
  /// Largest great-circle distance between neighbouring nodes.
  double node_spacing() const;
};

SurfaceNodes make_surface_nodes(const Vec3& center, double radius, const SphereQuadrature& rule);

}  // namespace nearfield
