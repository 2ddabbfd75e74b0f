#pragma once

#include "nearfield/scene.hpp"

namespace nearfield {

struct RadialOptions {
  int steps = 2000;               // nominal step a / steps away from the origin
  double r_min_fraction = 1e-6;   // integration starts at r_min = r_min_fraction * a
  bool source_integral = true;    // also accumulate the scattering source integral
};

/// Regular solution w = r^l u of w'' + (2/r) w' + (k^2 n(r) - l(l+1)/r^2) w = 0 on (0, a].
struct RadialSolution {
  int l = 0;
  double u_a = 0.0;       // u(a)
  double du_a = 0.0;      // u'(a)
  double fn = 0.0;        // w'(a) / w(a)
  double log_pole_ratio = 0.0;  // log(|w(a)| / max_r |w(r)|), <= 0
  /// Integral of (r/a)^l u(r) (n(r) - 1) j_l(k r) r^2 over (0, a).
  double source_integral = 0.0;

  double pole_ratio() const;
};

/// Fourth-order Runge-Kutta march for u = w / r^l on a mesh graded towards the
/// origin, with the potential breakpoints as mesh nodes. Never throws on poles;
/// callers inspect pole_ratio().
RadialSolution solve_regular(const RadialPotential& potential, int l, double k, double a,
                             const RadialOptions& options = {});

}  // namespace nearfield
