#pragma once

#include <string>
#include <vector>

#include "nearfield/quadrature.hpp"
#include "nearfield/scene.hpp"

namespace nearfield {

/// Complex matrix with tags naming the discrete spaces of its rows and columns.
struct DenseOperator {
  CMatrix matrix;
  std::string row_space;
  std::string col_space;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
};

/// Node set on S and harmonic basis Y_lm / a on the scatterer boundary.
struct Discretization {
  SceneConfig scene;
  SurfaceNodes source;
  SphereQuadrature boundary_rule;

  static Discretization from_scene(const SceneConfig& scene);

  int l_max() const { return scene.l_max; }
  int harmonic_size() const { return (scene.l_max + 1) * (scene.l_max + 1); }
  int node_count() const { return source.size(); }
  RVector source_weights() const;
  std::string source_space() const;
  std::string boundary_space() const;
};

/// L: node values on S -> coefficients of the incoming single-layer trace on the
/// scatterer boundary. Quadrature weights of S are included in the matrix.
DenseOperator assemble_L(const Discretization& disc);

/// L*: boundary coefficients -> node values on S of the outgoing single-layer potential.
DenseOperator assemble_Lstar(const Discretization& disc);

/// || L* - W^-1 L^H || / || L ||, Frobenius norms, W = diag(source weights).
double adjointness_residual(const Discretization& disc, const DenseOperator& L, const DenseOperator& Lstar);

struct SingularValueReport {
  std::vector<double> singular_values;  // descending
  double largest = 0.0;
  double smallest = 0.0;
  int fit_begin = 0;            // first index of the fitted window
  int fitted_count = 0;         // singular values in the window
  double decay_rate = 0.0;      // -slope of log(sigma_i) against i
  double fit_correlation = 0.0; // Pearson correlation of log(sigma_i) with i
};

/// Singular values of L as an operator L2(S) -> L2(boundary) and an
/// exponential-decay fit over those in (1e-13, 1e-5] * sigma_max.
SingularValueReport range_diagnostics(const Discretization& disc, const DenseOperator& L);

/// Singular values of L restricted to densities that are harmonics of degree
/// <= degree about the centre of S. A near-zero entry means some low-order
/// density radiates nothing (k rho at a Bessel zero).
std::vector<double> band_limited_singular_values(const Discretization& disc, const DenseOperator& L, int degree);

/// Quadrature value of sum_j w_j G(x, y_j) phi_j with G = exp(sign i k r) / r.
/// Throws ProximityError when x lies within one node spacing of S.
cdouble evaluate_incident_field(const Discretization& disc, const CVector& phi, const Vec3& x, int sign = -1);

/// Outgoing single-layer potential of the boundary density sum mu_lm Y_lm / a,
/// evaluated by the addition theorem on either side of the boundary.
cdouble single_layer_field(double k, double a, const CVector& mu, const Vec3& x);

}  // namespace nearfield
