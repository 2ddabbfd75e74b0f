#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nearfield/types.hpp"

namespace nearfield {

/// Scatterer ball of radius a at the origin, source ball of radius rho
/// centred at `center`, wavenumber k.
struct SceneConfig {
  double k = 2.0;
  double a = 1.0;
  double rho = 0.5;
  Vec3 center{3.0, 0.0, 0.0};
  int l_max = 25;
  int n_quad_s = 600;
  double eps_ball = 0.25;
  double delta_eig = 1e-6;
  /// Colatitude nodes on the scatterer boundary; 0 selects 2 (l_max + 1).
  int boundary_quad_order = 0;

  int boundary_theta_nodes() const { return boundary_quad_order > 0 ? boundary_quad_order : 2 * (l_max + 1); }
};

/// Piecewise-constant radial refractive profile n(r). Shell j covers
/// [breakpoints[j-1], breakpoints[j]) with value values[j]; n = 1 beyond the last breakpoint.
struct RadialPotential {
  std::vector<double> breakpoints;
  std::vector<double> values;

  static RadialPotential free_space() { return {}; }
  bool is_free() const;
  int shells() const { return static_cast<int>(values.size()); }
  /// Radius beyond which n = 1 (0 for the free model).
  double support_radius() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }
};

SceneConfig default_scene();
/// n = 1.5 on [0, 0.4), 0.8 on [0.4, 0.7), 1 elsewhere.
RadialPotential default_potential();

double evaluate_potential(const RadialPotential& potential, double r);

/// Throws ValidationError unless breakpoints are positive, strictly increasing,
/// inside (0, a) and the values are finite.
void check_potential(const RadialPotential& potential, double a);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const;
  const ValidationCheck* first_failure() const;
  std::string to_string() const;
};

/// Distance from x to the nearest positive zero of j_l, minimised over l <= lmax.
/// `degree` receives the minimising l.
double distance_to_bessel_zero(int lmax, double x, int* degree = nullptr);

/// Checks the standing assumptions of the scattering setup. Throws
/// GeometryError when the two balls overlap; every other failure is reported.
ValidationReport validate_scene(const SceneConfig& config, const RadialPotential& potential);

struct SceneFile {
  SceneConfig scene;
  RadialPotential potential;
};

/// Strict TOML reader: [scene] k, a, rho, center, l_max, n_quad_s and the optional
/// eps_ball, delta_eig, boundary_quad_order; [potential] breakpoints, values.
/// Throws ParseError (with line number when known) on syntax errors, unknown keys or wrong types.
SceneFile parse_scene(std::string_view text, std::string_view source_name = "<string>");
SceneFile load_scene(const std::string& path);

std::string scene_to_toml(const SceneConfig& config, const RadialPotential& potential);

/// FNV-1a 64-bit digest of the canonical scene text.
std::uint64_t scene_hash(const SceneConfig& config, const RadialPotential& potential);
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::uint64_t h);

}  // namespace nearfield
