#include "nearfield/radial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nearfield/specfun.hpp"

namespace nearfield {

double RadialSolution::pole_ratio() const { return std::exp(log_pole_ratio); }

namespace {

struct State {
  double u;
  double du;
  double src;
};

struct Rhs {
  int l;
  double k2n;
  double k;
  double contrast;  // n - 1 on this segment
  double a;
  bool with_source;

  State operator()(double r, const State& s) const {
    State d;
    d.u = s.du;
    d.du = -2.0 * (l + 1) / r * s.du - k2n * s.u;
    d.src = 0.0;
    if (with_source && contrast != 0.0) {
      d.src = std::pow(r / a, l) * r * r * s.u * contrast * spherical_bessel_j(l, k * r);
    }
    return d;
  }
};

State rk4(const Rhs& f, double r, double h, const State& s) {
  auto axpy = [](const State& x, double t, const State& d) {
    return State{x.u + t * d.u, x.du + t * d.du, x.src + t * d.src};
  };
  const State k1 = f(r, s);
  const State k2 = f(r + 0.5 * h, axpy(s, 0.5 * h, k1));
  const State k3 = f(r + 0.5 * h, axpy(s, 0.5 * h, k2));
  const State k4 = f(r + h, axpy(s, h, k3));
  return {s.u + h / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
          s.du + h / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du),
          s.src + h / 6.0 * (k1.src + 2 * k2.src + 2 * k3.src + k4.src)};
}

double log_abs(double v) {
  return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v));
}

}  // namespace

RadialSolution solve_regular(const RadialPotential& potential, int l, double k, double a,
                             const RadialOptions& options) {
  if (l < 0 || !(k > 0.0) || !(a > 0.0) || options.steps < 1) {
    throw std::invalid_argument("solve_regular: invalid arguments");
  }
  const double h = a / options.steps;
  const double grade = 500.0 * h / (a * (l + 1));
  const double r_min = options.r_min_fraction * a;

  // Frobenius start: u = 1 - k^2 n r^2 / (2 (2l + 3)) + ...
  const double n0 = evaluate_potential(potential, 0.0);
  State s{1.0 - k * k * n0 * r_min * r_min / (2.0 * (2 * l + 3)), -k * k * n0 * r_min / (2 * l + 3), 0.0};

  std::vector<double> nodes;
  for (double b : potential.breakpoints) {
    if (b > r_min && b < a) nodes.push_back(b);
  }
  nodes.push_back(a);

  double r = r_min;
  double log_w_max = l * std::log(r) + log_abs(s.u);
  for (double end : nodes) {
    const double n = evaluate_potential(potential, r);
    const Rhs f{l, k * k * n, k, n - 1.0, a, options.source_integral};
    while (r < end) {
      double step = std::min(h, grade * r);
      if (r + step >= end || end - (r + step) < 1e-3 * step) step = end - r;
      s = rk4(f, r, step, s);
      r = (step == end - r) ? end : r + step;
      log_w_max = std::max(log_w_max, l * std::log(r) + log_abs(s.u));
    }
  }

  RadialSolution out;
  out.l = l;
  out.u_a = s.u;
  out.du_a = s.du;
  out.fn = l / a + s.du / s.u;
  out.log_pole_ratio = l * std::log(a) + log_abs(s.u) - log_w_max;
  out.source_integral = s.src;
  return out;
}

}  // namespace nearfield
