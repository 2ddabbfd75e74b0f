#include "nearfield/emission.hpp"

#include <cmath>
#include <sstream>

#include "nearfield/errors.hpp"
#include "nearfield/specfun.hpp"

namespace nearfield {

std::vector<TraceComponent> emission_components(const SceneConfig& scene, const EmissionConfig& config) {
  const double eps = config.eps_inflate > 0.0 ? config.eps_inflate : scene.eps_ball;
  const double c = scene.center.norm();
  const double inflated = scene.rho + eps;
  if (config.degree < 0) throw ValidationError("emission: negative truncation degree");
  if (c - inflated <= scene.a) {
    throw GeometryError("emission: inflated source ball meets the scatterer ball");
  }
  std::vector<TraceComponent> out;
  if (config.topology == EmissionTopology::Ball) {
    const double R = config.r_outer > 0.0 ? config.r_outer : 1.1 * scene.a;
    if (R < scene.a) throw GeometryError("emission: sphere does not enclose the scatterer ball");
    if (R >= c - inflated) throw GeometryError("emission: sphere intersects the inflated source ball");
    out.push_back({"ball", {0.0, 0.0, 0.0}, R, false, config.degree, 0});
  } else {
    const double R = config.r_outer > 0.0 ? config.r_outer : 2.0 * (c + inflated);
    if (R <= c + inflated) throw GeometryError("emission: outer sphere does not contain the inflated source ball");
    out.push_back({"inflated_source", scene.center, inflated, true, config.degree, 0});
    out.push_back({"outer", {0.0, 0.0, 0.0}, R, true, config.degree, harmonic_count(config.degree)});
  }
  return out;
}

EmissionOperators assemble_Ltilde(const SceneConfig& scene, const SurfaceNodes& source, const EmissionConfig& config) {
  EmissionOperators ops;
  ops.components = emission_components(scene, config);
  int rows = 0;
  for (const auto& comp : ops.components) rows += harmonic_count(comp.degree);
  const int n = source.size();
  const double k = scene.k;
  ops.incoming = {CMatrix(rows, n), "emission:harmonics", "S:nodes"};
  ops.outgoing = {CMatrix(rows, n), "emission:harmonics", "S:nodes"};
  ops.norm_weights.resize(rows);

  for (const auto& comp : ops.components) {
    const int L = comp.degree;
    for (int l = 0; l <= L; ++l) {
      const double w = std::pow(1.0 + l * (l + 1.0), config.sobolev_order / 2.0);
      for (int m = -l; m <= l; ++m) ops.norm_weights[comp.offset + harmonic_index(l, m)] = w;
    }
    const auto shell = spherical_bessel_table(L, k * comp.radius);
    for (int j = 0; j < n; ++j) {
      const Spherical sp = to_spherical(source.points[j] - comp.center);
      const auto y = spherical_harmonics(L, sp.theta, sp.phi);
      const auto node = spherical_bessel_table(L, k * sp.r);
      const double pre = 4.0 * kPi * k * comp.radius * source.weights[j];
      for (int l = 0; l <= L; ++l) {
        // outgoing kernel: 4 pi i k j_l(k r<) h_l(k r>); incoming is its conjugate
        const cdouble radial = comp.sources_inside ? node.j[l] * shell.h(l) : shell.j[l] * node.h(l);
        const cdouble out = kI * pre * radial;
        const cdouble in = -kI * pre * std::conj(radial);
        for (int m = -l; m <= l; ++m) {
          const int q = harmonic_index(l, m);
          const cdouble yc = std::conj(y[q]);
          ops.outgoing.matrix(comp.offset + q, j) = out * yc;
          ops.incoming.matrix(comp.offset + q, j) = in * yc;
        }
      }
    }
  }
  return ops;
}

cdouble evaluate_component_trace(const EmissionOperators& ops, int component, const CVector& trace, const Vec3& x,
                                 double) {
  const auto& comp = ops.components.at(component);
  const Spherical sp = to_spherical(x - comp.center);
  const auto y = spherical_harmonics(comp.degree, sp.theta, sp.phi);
  cdouble sum = 0.0;
  for (int q = 0; q < harmonic_count(comp.degree); ++q) sum += trace[comp.offset + q] * y[q];
  return sum / comp.radius;
}

EmissionSynthesizer::EmissionSynthesizer(const SceneConfig& scene, const SurfaceNodes& source,
                                         const EmissionConfig& config)
    : scene_(scene), config_(config), ops_(assemble_Ltilde(scene, source, config)) {
  if (config.steps < 1) throw ValidationError("emission: need at least one regularization step");
  sqrt_w_ = Eigen::Map<const RVector>(source.weights.data(), source.size()).cwiseSqrt();
  // A = D * outgoing * W^-1/2 acts on z = W^1/2 psi, so ||z|| = ||psi||_L2(S).
  const CMatrix A = ops_.norm_weights.asDiagonal() * ops_.outgoing.matrix * sqrt_w_.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  U_ = svd.matrixU();
  sigma_ = svd.singularValues();
  V_ = svd.matrixV();
  const double floor = sigma_.size() ? sigma_[0] * 1e-14 * std::max(A.rows(), A.cols()) : 0.0;
  numerical_rank_ = 0;
  while (numerical_rank_ < sigma_.size() && sigma_[numerical_rank_] > floor) ++numerical_rank_;
}

double EmissionSynthesizer::alpha(int step) const {
  const double s0 = sigma_.size() ? sigma_[0] : 0.0;
  return s0 * s0 * std::pow(10.0, -step);
}

int EmissionSynthesizer::rank(int step) const {
  const int r = static_cast<int>(std::ceil(static_cast<double>(step) * numerical_rank_ / config_.steps));
  return std::clamp(r, 0, numerical_rank_);
}

SynthesisResult EmissionSynthesizer::synthesize(const CVector& phi, int step, const NearFieldCheck* check) const {
  if (phi.size() != sqrt_w_.size()) throw std::invalid_argument("synthesize: density size does not match S");
  SynthesisResult r;
  r.step = step;
  const CVector b = ops_.norm_weights.asDiagonal() * (ops_.incoming.matrix * phi);
  const CVector ub = U_.adjoint() * b;
  CVector filtered = CVector::Zero(ub.size());
  if (config_.regularization == RegularizationKind::Tikhonov) {
    const double al = alpha(step);
    r.parameter = al;
    for (int i = 0; i < numerical_rank_; ++i) filtered[i] = sigma_[i] / (sigma_[i] * sigma_[i] + al) * ub[i];
  } else {
    const int rk = rank(step);
    r.parameter = rk;
    for (int i = 0; i < rk; ++i) filtered[i] = ub[i] / sigma_[i];
  }
  const CVector z = V_ * filtered;
  r.psi = z.cwiseQuotient(sqrt_w_.cast<cdouble>());
  const CVector misfit = ops_.norm_weights.asDiagonal() * (ops_.outgoing.matrix * r.psi) - b;
  r.residual_h32 = misfit.norm();
  const double bn = b.norm();
  r.relative_residual = bn > 0.0 ? r.residual_h32 / bn : 0.0;
  if (check) {
    const CVector diff = check->scattered_trace(r.psi) - check->target;
    const RVector w = sqrt_w_.cwiseAbs2();
    auto l2 = [&](const CVector& v) { return std::sqrt((w.array() * v.array().abs2()).sum()); };
    r.nearfield_error = l2(diff);
    const double tn = l2(check->target);
    r.relative_nearfield_error = tn > 0.0 ? r.nearfield_error / tn : r.nearfield_error;
  }
  return r;
}

std::vector<SynthesisResult> EmissionSynthesizer::path(const CVector& phi, const NearFieldCheck* check) const {
  std::vector<SynthesisResult> out;
  out.reserve(config_.steps);
  for (int n = 1; n <= config_.steps; ++n) {
    out.push_back(synthesize(phi, n, check));
    if (out.size() > 1) {
      const auto& prev = out[out.size() - 2];
      auto& cur = out.back();
      cur.plateau = cur.relative_residual > 1e-3 && cur.residual_h32 > 0.999 * prev.residual_h32;
    }
  }
  return out;
}

}  // namespace nearfield
