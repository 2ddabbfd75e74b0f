#pragma once

#include <string>
#include <vector>

#include "nearfield/radial.hpp"
#include "nearfield/scene.hpp"

namespace nearfield {

enum class DtnKind { F0, Fout, Fn };

std::string to_string(DtnKind kind);
DtnKind dtn_kind_from_string(const std::string& s);

/// Diagonal operator on the scatterer boundary: one entry per degree l,
/// shared by all orders m.
struct HarmonicDiagonal {
  DtnKind kind = DtnKind::F0;
  double k = 0.0;
  double a = 0.0;
  std::vector<cdouble> entries;

  int l_max() const { return static_cast<int>(entries.size()) - 1; }
  cdouble operator[](int l) const { return entries[l]; }
  /// Entry for every packed (l, m) index up to l_max.
  CVector expanded() const;
};

/// k j_l'(ka) / j_l(ka). Throws PoleError when ka is within delta_eig of a zero
/// of j_l, measured by the Newton step |j_l / j_l'|.
double dtn_interior_free(int l, double k, double a, double delta_eig = 1e-6);

/// k h_l'(ka) / h_l(ka) for the outgoing Hankel function.
cdouble dtn_exterior(int l, double k, double a);

/// w'(a) / w(a) for the regular radial solution with potential n.
/// Throws PoleError when |w(a)| < pole_threshold * max |w|.
double dtn_potential(const RadialPotential& potential, int l, double k, double a,
                     const RadialOptions& options = {}, double pole_threshold = 1e-8);

HarmonicDiagonal interior_free_diagonal(int l_max, double k, double a, double delta_eig = 1e-6);
HarmonicDiagonal exterior_diagonal(int l_max, double k, double a);
HarmonicDiagonal potential_diagonal(const RadialPotential& potential, int l_max, double k, double a,
                                    const RadialOptions& options = {}, double pole_threshold = 1e-8);

/// (f0 - fout) (fn - fout)^-1 (f0 - fn) per degree. Throws InvertibilityError
/// if some |fn - fout| < 1e-12.
std::vector<cdouble> middle_symbol(const HarmonicDiagonal& f0, const HarmonicDiagonal& fout,
                                   const HarmonicDiagonal& fn);

}  // namespace nearfield
