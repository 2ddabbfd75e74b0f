#pragma once

#include <map>
#include <string>
#include <vector>

#include "nearfield/dtn.hpp"
#include "nearfield/layer_potentials.hpp"
#include "nearfield/radial.hpp"
#include "nearfield/scene.hpp"

namespace nearfield {

enum class FieldKind {
  Regular,        // sum c_lm j_l(k r) Y_lm
  Outgoing,       // sum d_lm h_l(k r) Y_lm
  BoundaryTrace,  // sum c_lm Y_lm / radius on the sphere |x| = radius
  FarField,       // sum c_lm Y_lm on directions
};

/// Spherical-harmonic expansion about the origin.
struct HarmonicField {
  FieldKind kind = FieldKind::Regular;
  int l_max = 0;
  double k = 0.0;
  double radius = 0.0;
  CVector coefficients;

  /// Point value; for BoundaryTrace and FarField only the direction of x is used.
  cdouble evaluate(const Vec3& x) const;
};

struct DirectSolution {
  CVector trace_s;                // scattered field at the nodes of S
  HarmonicField trace_boundary;   // scattered trace on the scatterer boundary
  HarmonicField incident;         // regular-wave coefficients of the incident field
  HarmonicField scattered;        // outgoing coefficients of the scattered field
};

struct NearFieldMatrix {
  DenseOperator op;
  std::string provenance;  // "direct" or "factorized"
  std::map<std::string, std::string> metadata;
};

/// Spectral forward solver for a radial potential inside the scatterer ball.
class ForwardSolver {
 public:
  ForwardSolver(const SceneConfig& scene, const RadialPotential& potential, const RadialOptions& options = {});

  const Discretization& discretization() const { return disc_; }
  const SceneConfig& scene() const { return disc_.scene; }
  const RadialPotential& potential() const { return potential_; }
  const HarmonicDiagonal& f0() const { return f0_; }
  const HarmonicDiagonal& fout() const { return fout_; }
  const HarmonicDiagonal& fn() const { return fn_; }
  /// d_l / c_l: outgoing coefficient produced by a unit regular wave of degree l.
  const std::vector<cdouble>& scattering_ratio() const { return ratio_; }
  /// (f0 - fout)(fn - fout)^-1 (f0 - fn) per degree.
  const std::vector<cdouble>& middle() const { return middle_; }

  /// Regular-wave coefficients about the origin of sum_j w_j G_sign(x, y_j) density_j.
  HarmonicField incident_coefficients(const SurfaceNodes& nodes, const CVector& density, int sign) const;
  HarmonicField scatter(const HarmonicField& incident) const;

  /// Scattered field of the incident wave emitted by `density` on `nodes`
  /// with the incoming (sign = -1) or outgoing (sign = +1) kernel; traced on the same nodes.
  DirectSolution solve_direct(const SurfaceNodes& nodes, const CVector& density, int sign = -1) const;
  DirectSolution solve_direct(const CVector& phi) const { return solve_direct(disc_.source, phi, -1); }

  /// Scattered trace on S of the wave radiated by psi through the outgoing kernel.
  CVector emitted_scattered_trace(const CVector& psi) const { return solve_direct(disc_.source, psi, +1).trace_s; }

  NearFieldMatrix nearfield_direct() const;
  NearFieldMatrix nearfield_factorized(const DenseOperator& L, const DenseOperator& Lstar) const;
  NearFieldMatrix nearfield_factorized() const;

  /// Scattered trace on the boundary from the incident trace L phi:
  /// (Fn - Fout)^-1 (F0 - Fn) applied per harmonic.
  HarmonicField boundary_trace_from_incident(const CVector& incident_trace) const;

  /// Middle operator as a (l_max+1)^2 square diagonal matrix.
  CMatrix middle_operator() const;

  /// ||F restricted to degree l_max|| / ||F||: truncation monitor of the direct path.
  double truncation_tail() const;

 private:
  Discretization disc_;
  RadialPotential potential_;
  HarmonicDiagonal f0_, fout_, fn_;
  std::vector<cdouble> ratio_;
  std::vector<cdouble> middle_;

  CMatrix outgoing_basis(const SurfaceNodes& nodes, int l_first, int l_last) const;
  CMatrix incident_matrix(const SurfaceNodes& nodes, int sign, int l_first, int l_last) const;
  std::map<std::string, std::string> metadata() const;
};

/// mu = (1/4pi)(F0 - Fout) applied to a boundary trace; its outgoing
/// single-layer potential reproduces the scattered field outside the scatterer.
CVector boundary_density_mu(const HarmonicDiagonal& f0, const HarmonicDiagonal& fout, const HarmonicField& trace);

/// Far-field pattern coefficients (1/k) (-i)^(l+1) d_lm of an outgoing field.
HarmonicField far_field_amplitude(const HarmonicField& scattered);

/// Relative spectral-norm difference ||A - B||_2 / ||B||_2.
double relative_spectral_difference(const CMatrix& A, const CMatrix& B);
double spectral_norm(const CMatrix& A);

}  // namespace nearfield
