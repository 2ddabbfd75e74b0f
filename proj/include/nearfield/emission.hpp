#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nearfield/layer_potentials.hpp"
#include "nearfield/scene.hpp"

namespace nearfield {

enum class EmissionTopology {
  Ball,     // one sphere about the origin, enclosing the scatterer and avoiding the inflated source ball
  Annulus,  // large outer sphere plus the sphere of the inflated source ball
};

enum class RegularizationKind { Tikhonov, TruncatedSvd };

struct EmissionConfig {
  EmissionTopology topology = EmissionTopology::Ball;
  /// Radius of the sphere about the origin; 0 selects 1.1 a (Ball) or 2 (|c| + rho + eps) (Annulus).
  double r_outer = 0.0;
  /// Inflation of the source ball; 0 selects the scene's eps_ball.
  double eps_inflate = 0.0;
  double sobolev_order = 1.5;
  /// Harmonic truncation degree on every component sphere.
  int degree = 5;
  RegularizationKind regularization = RegularizationKind::Tikhonov;
  /// Number of path steps: alpha_n = sigma_max^2 10^-n, or ranks growing linearly to full rank.
  int steps = 22;
};

struct TraceComponent {
  std::string name;
  Vec3 center;
  double radius = 0.0;
  bool sources_inside = false;
  int degree = 0;
  int offset = 0;  // first row in the stacked operators
};

/// Traces on all component spheres of the synthesis surface, stacked by component.
struct EmissionOperators {
  std::vector<TraceComponent> components;
  DenseOperator incoming;  // incoming-kernel trace of node values on S
  DenseOperator outgoing;  // outgoing-kernel trace
  RVector norm_weights;    // (1 + l(l+1))^(s/2) per row
};

/// Resolves automatic radii and checks that the components are disjoint from
/// each other, from the inflated source ball and (Ball) from the scatterer ball.
/// Throws GeometryError otherwise.
std::vector<TraceComponent> emission_components(const SceneConfig& scene, const EmissionConfig& config);

/// Trace operators by the addition theorem about each component centre.
EmissionOperators assemble_Ltilde(const SceneConfig& scene, const SurfaceNodes& source, const EmissionConfig& config);

/// Pointwise value of a stacked trace vector on component c at x (on that sphere).
cdouble evaluate_component_trace(const EmissionOperators& ops, int component, const CVector& trace, const Vec3& x,
                                 double k);

/// Optional check of the synthesized density against the near-field data:
/// `scattered_trace` maps psi to the scattered trace on S of its emitted wave,
/// `target` is F_S phi.
struct NearFieldCheck {
  std::function<CVector(const CVector&)> scattered_trace;
  CVector target;
};

struct SynthesisResult {
  int step = 0;
  double parameter = 0.0;         // alpha (Tikhonov) or rank (truncated SVD)
  CVector psi;
  double residual_h32 = 0.0;      // || D (outgoing psi - incoming phi) ||
  double relative_residual = 0.0; // residual_h32 / || D incoming phi ||
  double nearfield_error = -1.0;  // L2(S) norm of scattered(psi) - target; -1 without a check
  double relative_nearfield_error = -1.0;
  bool plateau = false;           // residual stalled: effective rank saturated
};

class EmissionSynthesizer {
 public:
  EmissionSynthesizer(const SceneConfig& scene, const SurfaceNodes& source, const EmissionConfig& config = {});

  const EmissionOperators& operators() const { return ops_; }
  const EmissionConfig& config() const { return config_; }
  const RVector& singular_values() const { return sigma_; }
  double alpha(int step) const;
  int rank(int step) const;

  SynthesisResult synthesize(const CVector& phi, int step, const NearFieldCheck* check = nullptr) const;
  /// Steps 1..config.steps in order; flags plateaus relative to the previous step.
  std::vector<SynthesisResult> path(const CVector& phi, const NearFieldCheck* check = nullptr) const;

 private:
  SceneConfig scene_;
  EmissionConfig config_;
  EmissionOperators ops_;
  RVector sqrt_w_;
  CMatrix U_;
  RVector sigma_;
  CMatrix V_;
  int numerical_rank_ = 0;
};

}  // namespace nearfield
