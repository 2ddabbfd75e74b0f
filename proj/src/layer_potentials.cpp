#include "nearfield/layer_potentials.hpp"

#include <cmath>
#include <sstream>

#include "nearfield/errors.hpp"
#include "nearfield/parallel.hpp"
#include "nearfield/specfun.hpp"

namespace nearfield {

Discretization Discretization::from_scene(const SceneConfig& scene) {
  Discretization d;
  d.scene = scene;
  d.source = make_surface_nodes(scene.center, scene.rho, sphere_quadrature_with_at_least(scene.n_quad_s));
  const int nt = scene.boundary_theta_nodes();
  d.boundary_rule = make_sphere_quadrature(nt, 2 * nt);
  return d;
}

RVector Discretization::source_weights() const {
  return Eigen::Map<const RVector>(source.weights.data(), source.size());
}

std::string Discretization::source_space() const {
  std::ostringstream os;
  os << "S:nodes:" << source.rule.n_theta << "x" << source.rule.n_phi;
  return os.str();
}

std::string Discretization::boundary_space() const {
  std::ostringstream os;
  os << "dO:harmonics:l_max=" << scene.l_max;
  return os.str();
}

namespace {

// Projection of boundary traces onto the harmonic basis through a per-row
// discrete Fourier transform in phi followed by a Legendre sum in theta.
class BoundaryProjector {
 public:
  explicit BoundaryProjector(const Discretization& disc)
      : lmax_(disc.l_max()), a_(disc.scene.a), rule_(disc.boundary_rule) {
    const int nt = rule_.n_theta;
    const int np = rule_.n_phi;
    points_.reserve(nt * np);
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < np; ++j) points_.push_back(from_spherical(a_, rule_.theta[i], rule_.phi[j]));
    }
    legendre_.resize(nt);
    for (int i = 0; i < nt; ++i) legendre_[i] = normalized_legendre_table(lmax_, rule_.theta[i]);
    fourier_.resize(np, 2 * lmax_ + 1);
    for (int j = 0; j < np; ++j) {
      for (int m = -lmax_; m <= lmax_; ++m) fourier_(j, m + lmax_) = std::polar(1.0, -m * rule_.phi[j]);
    }
  }

  /// a * integral of G_sign(a x, y) conj(Y_lm(x)) over the unit sphere when
  /// conjugate_basis, otherwise a * integral of G_sign(a x, y) Y_lm(x).
  CVector project(const Vec3& y, double k, int sign, bool conjugate_basis) const {
    const int nt = rule_.n_theta;
    const int np = rule_.n_phi;
    const double dphi = 2.0 * kPi / np;
    Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> g(nt, np);
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < np; ++j) g(i, j) = helmholtz_kernel(points_[i * np + j], y, k, sign);
    }
    // Row DFT: F(i, m) = dphi * sum_j g(i, j) exp(-+ i m phi_j)
    CMatrix F = g * (conjugate_basis ? fourier_ : CMatrix(fourier_.conjugate()));
    F *= dphi;
    CVector out = CVector::Zero(harmonic_count(lmax_));
    for (int i = 0; i < nt; ++i) {
      const double w = rule_.gl_weight[i] * a_;
      const auto& p = legendre_[i];
      for (int l = 0; l <= lmax_; ++l) {
        for (int m = -l; m <= l; ++m) {
          const int am = std::abs(m);
          const double s = (m < 0 && (am % 2)) ? -1.0 : 1.0;
          out[harmonic_index(l, m)] += w * s * p[harmonic_index(l, am)] * F(i, m + lmax_);
        }
      }
    }
    return out;
  }

 private:
  int lmax_;
  double a_;
  SphereQuadrature rule_;
  std::vector<Vec3> points_;
  std::vector<std::vector<double>> legendre_;
  CMatrix fourier_;
};

}  // namespace

DenseOperator assemble_L(const Discretization& disc) {
  const BoundaryProjector proj(disc);
  const int n = disc.node_count();
  DenseOperator L{CMatrix(disc.harmonic_size(), n), disc.boundary_space(), disc.source_space()};
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int j = 0; j < n; ++j) {
    L.matrix.col(j) = disc.source.weights[j] * proj.project(disc.source.points[j], disc.scene.k, -1, true);
  }
  return L;
}

DenseOperator assemble_Lstar(const Discretization& disc) {
  const BoundaryProjector proj(disc);
  const int n = disc.node_count();
  DenseOperator Ls{CMatrix(n, disc.harmonic_size()), disc.source_space(), disc.boundary_space()};
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int i = 0; i < n; ++i) {
    Ls.matrix.row(i) = proj.project(disc.source.points[i], disc.scene.k, +1, false).transpose();
  }
  return Ls;
}

double adjointness_residual(const Discretization& disc, const DenseOperator& L, const DenseOperator& Lstar) {
  const RVector w = disc.source_weights();
  const CMatrix adj = w.cwiseInverse().asDiagonal() * L.matrix.adjoint();
  return (Lstar.matrix - adj).norm() / L.matrix.norm();
}

SingularValueReport range_diagnostics(const Discretization& disc, const DenseOperator& L) {
  const RVector w = disc.source_weights();
  const CMatrix A = L.matrix * w.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::BDCSVD<CMatrix> svd(A);
  const RVector s = svd.singularValues();

  SingularValueReport r;
  r.singular_values.assign(s.data(), s.data() + s.size());
  r.largest = s.size() ? s[0] : 0.0;
  r.smallest = s.size() ? s[s.size() - 1] : 0.0;

  // Asymptotic window: past the first five decades, above the rounding floor.
  int first = 0;
  while (first < s.size() && s[first] > 1e-5 * r.largest) ++first;
  int end = first;
  while (end < s.size() && s[end] > 1e-13 * r.largest) ++end;
  r.fit_begin = first;
  r.fitted_count = end - first;
  const int n = r.fitted_count;
  if (n >= 3) {
    double mx = 0, my = 0;
    for (int i = first; i < end; ++i) {
      mx += i;
      my += std::log(s[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = first; i < end; ++i) {
      const double dx = i - mx;
      const double dy = std::log(s[i]) - my;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    r.decay_rate = -sxy / sxx;
    r.fit_correlation = sxy / std::sqrt(sxx * syy);
  }
  return r;
}

std::vector<double> band_limited_singular_values(const Discretization& disc, const DenseOperator& L, int degree) {
  const int n = disc.node_count();
  CMatrix B(n, harmonic_count(degree));
  for (int j = 0; j < n; ++j) {
    const Spherical sp = to_spherical(disc.source.points[j] - disc.scene.center);
    const auto y = spherical_harmonics(degree, sp.theta, sp.phi);
    for (int q = 0; q < harmonic_count(degree); ++q) B(j, q) = y[q] / disc.scene.rho;
  }
  // Columns are orthonormal in L2(S), so singular values are those of the restriction.
  Eigen::BDCSVD<CMatrix> svd(L.matrix * B);
  const RVector s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

cdouble evaluate_incident_field(const Discretization& disc, const CVector& phi, const Vec3& x, int sign) {
  const double dist = std::abs((x - disc.scene.center).norm() - disc.scene.rho);
  if (dist < disc.source.node_spacing()) {
    std::ostringstream os;
    os << "evaluation point at distance " << dist << " from S, below the node spacing "
       << disc.source.node_spacing();
    throw ProximityError(os.str());
  }
  cdouble sum = 0.0;
  for (int j = 0; j < disc.node_count(); ++j) {
    sum += disc.source.weights[j] * helmholtz_kernel(x, disc.source.points[j], disc.scene.k, sign) * phi[j];
  }
  return sum;
}

cdouble single_layer_field(double k, double a, const CVector& mu, const Vec3& x) {
  const int lmax = static_cast<int>(std::lround(std::sqrt(static_cast<double>(mu.size())))) - 1;
  const Spherical sp = to_spherical(x);
  const double r_in = std::min(sp.r, a);
  const double r_out = std::max(sp.r, a);
  const auto y = spherical_harmonics(lmax, sp.theta, sp.phi);
  const auto jt = r_in > 0.0 ? spherical_bessel_j_array(lmax, k * r_in) : std::vector<double>{};
  const auto ht = spherical_bessel_table(lmax, k * r_out);
  cdouble sum = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    const double j = r_in > 0.0 ? jt[l] : (l == 0 ? 1.0 : 0.0);
    const cdouble radial = j * ht.h(l);
    for (int m = -l; m <= l; ++m) sum += mu[harmonic_index(l, m)] * radial * y[harmonic_index(l, m)];
  }
  return 4.0 * kPi * kI * k * a * sum;
}

}  // namespace nearfield
