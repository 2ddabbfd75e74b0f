#include "nearfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nearfield/specfun.hpp"

namespace nearfield {

SphereQuadrature make_sphere_quadrature(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("sphere quadrature: empty rule");
  SphereQuadrature q;
  q.n_theta = n_theta;
  q.n_phi = n_phi;
  const auto gl = gauss_legendre(n_theta);
  q.theta.resize(n_theta);
  q.gl_weight.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    // increasing colatitude <=> decreasing cos(theta)
    q.theta[i] = std::acos(gl.nodes[n_theta - 1 - i]);
    q.gl_weight[i] = gl.weights[n_theta - 1 - i];
  }
  q.phi.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) q.phi[j] = 2.0 * kPi * j / n_phi;
  return q;
}

SphereQuadrature sphere_quadrature_with_at_least(int min_nodes) {
  const int n_theta = std::max(1, static_cast<int>(std::ceil(std::sqrt(min_nodes / 2.0))));
  return make_sphere_quadrature(n_theta, 2 * n_theta);
}

SurfaceNodes make_surface_nodes(const Vec3& center, double radius, const SphereQuadrature& rule) {
  SurfaceNodes s;
  s.center = center;
  s.radius = radius;
  s.rule = rule;
  s.points.reserve(rule.size());
  s.normals.reserve(rule.size());
  s.weights.reserve(rule.size());
  for (int i = 0; i < rule.n_theta; ++i) {
    for (int j = 0; j < rule.n_phi; ++j) {
      const Vec3 n = from_spherical(1.0, rule.theta[i], rule.phi[j]);
      s.normals.push_back(n);
      s.points.push_back(center + radius * n);
      s.weights.push_back(rule.weight(i) * radius * radius);
    }
  }
  return s;
}

double SurfaceNodes::node_spacing() const {
  double dtheta = 0.0;
  for (int i = 0; i + 1 < rule.n_theta; ++i) dtheta = std::max(dtheta, rule.theta[i + 1] - rule.theta[i]);
  dtheta = std::max({dtheta, rule.theta.front(), kPi - rule.theta.back()});
  const double dphi = 2.0 * kPi / rule.n_phi;
  return radius * std::max(dtheta, dphi);
}

}  // namespace nearfield
