#include "nearfield/dtn.hpp"

#include <cmath>
#include <sstream>

#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/specfun.hpp"

namespace nearfield {

std::string to_string(DtnKind kind) {
  switch (kind) {
    case DtnKind::F0: return "F0";
    case DtnKind::Fout: return "Fout";
    case DtnKind::Fn: return "Fn";
  }
  return "?";
}

DtnKind dtn_kind_from_string(const std::string& s) {
  if (s == "F0") return DtnKind::F0;
  if (s == "Fout") return DtnKind::Fout;
  if (s == "Fn") return DtnKind::Fn;
  throw std::invalid_argument("unknown DtN kind '" + s + "'");
}

CVector HarmonicDiagonal::expanded() const {
  const int lmax = l_max();
  CVector v(harmonic_count(lmax));
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) v[harmonic_index(l, m)] = entries[l];
  }
  return v;
}

double dtn_interior_free(int l, double k, double a, double delta_eig) {
  const auto t = spherical_bessel_table(l, k * a);
  const double j = t.j[l];
  const double dj = t.dj[l];
  if (std::abs(j) < delta_eig * std::abs(dj)) {
    std::ostringstream os;
    os << "k a = " << k * a << " is within " << delta_eig << " of a zero of j_" << l
       << " (Dirichlet eigenvalue of the scatterer ball)";
    throw PoleError(os.str(), l);
  }
  return k * dj / j;
}

cdouble dtn_exterior(int l, double k, double a) {
  const auto t = spherical_bessel_table(l, k * a);
  return k * t.dh(l) / t.h(l);
}

double dtn_potential(const RadialPotential& potential, int l, double k, double a, const RadialOptions& options,
                     double pole_threshold) {
  RadialOptions opts = options;
  opts.source_integral = false;
  const auto sol = solve_regular(potential, l, k, a, opts);
  if (sol.pole_ratio() < pole_threshold) {
    std::ostringstream os;
    os << "|w(a)| / max|w| = " << sol.pole_ratio() << " at l = " << l
       << " (interior eigenvalue of the potential problem)";
    throw PoleError(os.str(), l);
  }
  return sol.fn;
}

namespace {

template <class F>
HarmonicDiagonal tabulate(DtnKind kind, int l_max, double k, double a, F&& entry) {
  HarmonicDiagonal d;
  d.kind = kind;
  d.k = k;
  d.a = a;
  d.entries.resize(l_max + 1);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int l = 0; l <= l_max; ++l) {
    try {
      d.entries[l] = entry(l);
    } catch (...) {
#pragma omp critical(nearfield_dtn_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return d;
}

}  // namespace

HarmonicDiagonal interior_free_diagonal(int l_max, double k, double a, double delta_eig) {
  // Sequential so the lowest failing degree is the one reported.
  HarmonicDiagonal d{DtnKind::F0, k, a, {}};
  for (int l = 0; l <= l_max; ++l) d.entries.push_back(dtn_interior_free(l, k, a, delta_eig));
  return d;
}

HarmonicDiagonal exterior_diagonal(int l_max, double k, double a) {
  return tabulate(DtnKind::Fout, l_max, k, a, [&](int l) { return dtn_exterior(l, k, a); });
}

HarmonicDiagonal potential_diagonal(const RadialPotential& potential, int l_max, double k, double a,
                                    const RadialOptions& options, double pole_threshold) {
  return tabulate(DtnKind::Fn, l_max, k, a,
                  [&](int l) { return cdouble(dtn_potential(potential, l, k, a, options, pole_threshold)); });
}

std::vector<cdouble> middle_symbol(const HarmonicDiagonal& f0, const HarmonicDiagonal& fout,
                                   const HarmonicDiagonal& fn) {
  const int lmax = std::min({f0.l_max(), fout.l_max(), fn.l_max()});
  std::vector<cdouble> m(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    const cdouble denom = fn[l] - fout[l];
    if (std::abs(denom) < 1e-12) {
      throw InvertibilityError("F_n - F_out is not invertible at l = " + std::to_string(l));
    }
    m[l] = (f0[l] - fout[l]) / denom * (f0[l] - fn[l]);
  }
  return m;
}

}  // namespace nearfield
