#include "nearfield/forward.hpp"

#include <cmath>
#include <sstream>

#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/specfun.hpp"

#ifndef NEARFIELD_VERSION
#define NEARFIELD_VERSION "0.0.0"
#endif

namespace nearfield {

cdouble HarmonicField::evaluate(const Vec3& x) const {
  const Spherical sp = to_spherical(x);
  const auto y = spherical_harmonics(l_max, sp.theta, sp.phi);
  std::vector<cdouble> radial(l_max + 1, 1.0);
  switch (kind) {
    case FieldKind::Regular: {
      const auto j = sp.r > 0.0 ? spherical_bessel_j_array(l_max, k * sp.r) : std::vector<double>{};
      for (int l = 0; l <= l_max; ++l) radial[l] = sp.r > 0.0 ? j[l] : (l == 0 ? 1.0 : 0.0);
      break;
    }
    case FieldKind::Outgoing: {
      const auto t = spherical_bessel_table(l_max, k * sp.r);
      for (int l = 0; l <= l_max; ++l) radial[l] = t.h(l);
      break;
    }
    case FieldKind::BoundaryTrace:
      for (int l = 0; l <= l_max; ++l) radial[l] = 1.0 / radius;
      break;
    case FieldKind::FarField:
      break;
  }
  cdouble sum = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int q = harmonic_index(l, m);
      sum += coefficients[q] * radial[l] * y[q];
    }
  }
  return sum;
}

ForwardSolver::ForwardSolver(const SceneConfig& scene, const RadialPotential& potential, const RadialOptions& options)
    : disc_(Discretization::from_scene(scene)), potential_(potential) {
  check_potential(potential, scene.a);
  const int lmax = scene.l_max;
  const double k = scene.k;
  const double a = scene.a;
  f0_ = interior_free_diagonal(lmax, k, a, scene.delta_eig);
  fout_ = exterior_diagonal(lmax, k, a);
  fn_ = HarmonicDiagonal{DtnKind::Fn, k, a, std::vector<cdouble>(lmax + 1)};
  ratio_.assign(lmax + 1, 0.0);

  const auto bt = spherical_bessel_table(lmax, k * a);
  std::vector<RadialSolution> sols(lmax + 1);
  RadialOptions opts = options;
  opts.source_integral = true;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int l = 0; l <= lmax; ++l) sols[l] = solve_regular(potential, l, k, a, opts);

  for (int l = 0; l <= lmax; ++l) {
    const auto& s = sols[l];
    if (s.pole_ratio() < 1e-8) {
      std::ostringstream os;
      os << "|w(a)| / max|w| = " << s.pole_ratio() << " at l = " << l
         << " (interior eigenvalue of the potential problem)";
      throw PoleError(os.str(), l);
    }
    fn_.entries[l] = s.fn;
    const cdouble wronskian = a * a * (s.u_a * k * bt.dh(l) - (l * s.u_a / a + s.du_a) * bt.h(l));
    ratio_[l] = -k * k * s.source_integral / wronskian;
  }
  middle_ = middle_symbol(f0_, fout_, fn_);
}

CMatrix ForwardSolver::outgoing_basis(const SurfaceNodes& nodes, int l_first, int l_last) const {
  const int n = nodes.size();
  const int q0 = l_first * l_first;
  CMatrix E(n, harmonic_count(l_last) - q0);
  for (int i = 0; i < n; ++i) {
    const Spherical sp = to_spherical(nodes.points[i]);
    const auto y = spherical_harmonics(l_last, sp.theta, sp.phi);
    const auto t = spherical_bessel_table(l_last, scene().k * sp.r);
    for (int l = l_first; l <= l_last; ++l) {
      for (int m = -l; m <= l; ++m) E(i, harmonic_index(l, m) - q0) = t.h(l) * y[harmonic_index(l, m)];
    }
  }
  return E;
}

CMatrix ForwardSolver::incident_matrix(const SurfaceNodes& nodes, int sign, int l_first, int l_last) const {
  const int n = nodes.size();
  const int q0 = l_first * l_first;
  const double k = scene().k;
  CMatrix C(harmonic_count(l_last) - q0, n);
  for (int j = 0; j < n; ++j) {
    const Spherical sp = to_spherical(nodes.points[j]);
    if (sp.r <= scene().a) throw GeometryError("source node inside the scatterer ball");
    const auto y = spherical_harmonics(l_last, sp.theta, sp.phi);
    const auto t = spherical_bessel_table(l_last, k * sp.r);
    const cdouble pre = static_cast<double>(sign) * 4.0 * kPi * kI * k * nodes.weights[j];
    for (int l = l_first; l <= l_last; ++l) {
      const cdouble h = sign < 0 ? std::conj(t.h(l)) : t.h(l);
      for (int m = -l; m <= l; ++m) {
        C(harmonic_index(l, m) - q0, j) = pre * h * std::conj(y[harmonic_index(l, m)]);
      }
    }
  }
  return C;
}

HarmonicField ForwardSolver::incident_coefficients(const SurfaceNodes& nodes, const CVector& density,
                                                   int sign) const {
  if (density.size() != nodes.size()) throw std::invalid_argument("density size does not match the node set");
  return {FieldKind::Regular, scene().l_max, scene().k, 0.0, incident_matrix(nodes, sign, 0, scene().l_max) * density};
}

HarmonicField ForwardSolver::scatter(const HarmonicField& incident) const {
  HarmonicField out{FieldKind::Outgoing, incident.l_max, incident.k, 0.0, CVector(incident.coefficients.size())};
  for (int l = 0; l <= incident.l_max; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int q = harmonic_index(l, m);
      out.coefficients[q] = ratio_[l] * incident.coefficients[q];
    }
  }
  return out;
}

DirectSolution ForwardSolver::solve_direct(const SurfaceNodes& nodes, const CVector& density, int sign) const {
  DirectSolution s;
  s.incident = incident_coefficients(nodes, density, sign);
  s.scattered = scatter(s.incident);
  s.trace_s = outgoing_basis(nodes, 0, scene().l_max) * s.scattered.coefficients;
  const int lmax = scene().l_max;
  const double a = scene().a;
  const auto t = spherical_bessel_table(lmax, scene().k * a);
  s.trace_boundary = {FieldKind::BoundaryTrace, lmax, scene().k, a, CVector(s.scattered.coefficients.size())};
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int q = harmonic_index(l, m);
      s.trace_boundary.coefficients[q] = a * t.h(l) * s.scattered.coefficients[q];
    }
  }
  return s;
}

std::map<std::string, std::string> ForwardSolver::metadata() const {
  const auto& sc = scene();
  std::map<std::string, std::string> md;
  md["scene_hash"] = hex_digest(scene_hash(sc, potential_));
  md["l_max"] = std::to_string(sc.l_max);
  md["source_quadrature"] =
      std::to_string(disc_.source.rule.n_theta) + "x" + std::to_string(disc_.source.rule.n_phi);
  md["boundary_quadrature"] =
      std::to_string(disc_.boundary_rule.n_theta) + "x" + std::to_string(disc_.boundary_rule.n_phi);
  md["version"] = NEARFIELD_VERSION;
  return md;
}

NearFieldMatrix ForwardSolver::nearfield_direct() const {
  const int lmax = scene().l_max;
  const CMatrix E = outgoing_basis(disc_.source, 0, lmax);
  const CMatrix C = incident_matrix(disc_.source, -1, 0, lmax);
  CVector t(harmonic_count(lmax));
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) t[harmonic_index(l, m)] = ratio_[l];
  }
  NearFieldMatrix F;
  F.op = {E * t.asDiagonal() * C, disc_.source_space(), disc_.source_space()};
  F.provenance = "direct";
  F.metadata = metadata();
  return F;
}

NearFieldMatrix ForwardSolver::nearfield_factorized(const DenseOperator& L, const DenseOperator& Lstar) const {
  const int n = harmonic_count(scene().l_max);
  if (L.rows() != n || Lstar.cols() != n || L.cols() != Lstar.rows()) {
    throw std::invalid_argument("nearfield_factorized: operator shapes do not match the scene");
  }
  NearFieldMatrix F;
  F.op = {Lstar.matrix * (middle_operator() * L.matrix) / (4.0 * kPi), Lstar.row_space, L.col_space};
  F.provenance = "factorized";
  F.metadata = metadata();
  return F;
}

NearFieldMatrix ForwardSolver::nearfield_factorized() const {
  return nearfield_factorized(assemble_L(disc_), assemble_Lstar(disc_));
}

HarmonicField ForwardSolver::boundary_trace_from_incident(const CVector& incident_trace) const {
  const int lmax = scene().l_max;
  HarmonicField out{FieldKind::BoundaryTrace, lmax, scene().k, scene().a, CVector(harmonic_count(lmax))};
  for (int l = 0; l <= lmax; ++l) {
    const cdouble denom = fn_[l] - fout_[l];
    if (std::abs(denom) < 1e-12) throw InvertibilityError("F_n - F_out is not invertible at l = " + std::to_string(l));
    const cdouble g = (f0_[l] - fn_[l]) / denom;
    for (int m = -l; m <= l; ++m) out.coefficients[harmonic_index(l, m)] = g * incident_trace[harmonic_index(l, m)];
  }
  return out;
}

CMatrix ForwardSolver::middle_operator() const {
  const int lmax = scene().l_max;
  CVector d(harmonic_count(lmax));
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) d[harmonic_index(l, m)] = middle_[l];
  }
  return d.asDiagonal();
}

double ForwardSolver::truncation_tail() const {
  const int lmax = scene().l_max;
  const CMatrix E = outgoing_basis(disc_.source, lmax, lmax);
  const CMatrix C = incident_matrix(disc_.source, -1, lmax, lmax);
  const double top = (E * C).norm() * std::abs(ratio_[lmax]);
  const double total = nearfield_direct().op.matrix.norm();
  return total > 0.0 ? top / total : 0.0;
}

CVector boundary_density_mu(const HarmonicDiagonal& f0, const HarmonicDiagonal& fout, const HarmonicField& trace) {
  CVector mu(trace.coefficients.size());
  for (int l = 0; l <= trace.l_max; ++l) {
    const cdouble g = (f0[l] - fout[l]) / (4.0 * kPi);
    for (int m = -l; m <= l; ++m) mu[harmonic_index(l, m)] = g * trace.coefficients[harmonic_index(l, m)];
  }
  return mu;
}

HarmonicField far_field_amplitude(const HarmonicField& scattered) {
  if (scattered.kind != FieldKind::Outgoing) throw std::invalid_argument("far_field_amplitude: field is not outgoing");
  HarmonicField out{FieldKind::FarField, scattered.l_max, scattered.k, 0.0, CVector(scattered.coefficients.size())};
  cdouble phase = -kI;  // (-i)^(l+1) at l = 0
  for (int l = 0; l <= scattered.l_max; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int q = harmonic_index(l, m);
      out.coefficients[q] = phase * scattered.coefficients[q] / scattered.k;
    }
    phase *= -kI;
  }
  return out;
}

double spectral_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(A);
  return svd.singularValues()[0];
}

double relative_spectral_difference(const CMatrix& A, const CMatrix& B) {
  const double nb = spectral_norm(B);
  const double nd = spectral_norm(A - B);
  return nb > 0.0 ? nd / nb : nd;
}

}  // namespace nearfield
