#include "nearfield/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nearfield {

namespace {

void check_argument(int l, double x) {
  if (l < 0) throw std::domain_error("spherical Bessel: negative degree " + std::to_string(l));
  if (!(x > 0.0)) throw std::domain_error("spherical Bessel: argument must be positive");
}

// j_0..j_top by recurrence; top >= 1.
std::vector<double> bessel_j_upto(int top, double x) {
  std::vector<double> j(top + 1, 0.0);
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double j0 = s / x;

  if (x > static_cast<double>(top)) {
    // Every degree is below the turning point, upward recurrence is stable.
    j[0] = j0;
    j[1] = s / (x * x) - c / x;
    for (int n = 1; n < top; ++n) j[n + 1] = (2 * n + 1) / x * j[n] - j[n - 1];
    return j;
  }

  // Ratios rho_n = j_n / j_{n-1} from the continued fraction, started well past
  // the turning point so the truncation error is below double precision.
  const int start = top + 30 + static_cast<int>(std::ceil(4.0 * std::sqrt(top + x + 1.0)));
  std::vector<double> rho(top + 1, 0.0);
  double r = x / (2.0 * start + 1.0);
  for (int n = start - 1; n >= 1; --n) {
    r = x / (2.0 * n + 1.0 - x * r);
    if (n <= top) rho[n] = r;
  }

  if (std::abs(rho[1]) <= 1.0) {
    j[0] = j0;
    for (int n = 1; n <= top; ++n) j[n] = j[n - 1] * rho[n];
  } else {
    // j_0 is close to one of its zeros; anchor on j_1 instead.
    j[1] = s / (x * x) - c / x;
    j[0] = j[1] / rho[1];
    for (int n = 2; n <= top; ++n) j[n] = j[n - 1] * rho[n];
  }
  return j;
}

std::vector<double> bessel_y_upto(int top, double x) {
  std::vector<double> y(top + 1, 0.0);
  const double s = std::sin(x);
  const double c = std::cos(x);
  y[0] = -c / x;
  y[1] = -c / (x * x) - s / x;
  for (int n = 1; n < top; ++n) y[n + 1] = (2 * n + 1) / x * y[n] - y[n - 1];
  return y;
}

// d/dx f_l = f_{l-1} - (l+1)/x f_l, f_0' = -f_1.
std::vector<double> derivatives(const std::vector<double>& f, int lmax, double x) {
  std::vector<double> d(lmax + 1);
  d[0] = -f[1];
  for (int l = 1; l <= lmax; ++l) d[l] = f[l - 1] - (l + 1) / x * f[l];
  return d;
}

}  // namespace

SphericalBasisIndex harmonic_from_index(int index) {
  const int l = static_cast<int>(std::sqrt(static_cast<double>(index)));
  return {l, index - l * l - l};
}

std::vector<double> spherical_bessel_j_array(int lmax, double x) {
  check_argument(lmax, x);
  auto j = bessel_j_upto(std::max(lmax, 1), x);
  j.resize(lmax + 1);
  return j;
}

BesselTable spherical_bessel_table(int lmax, double x) {
  check_argument(lmax, x);
  const int top = lmax + 1;
  const auto j = bessel_j_upto(top, x);
  const auto y = bessel_y_upto(top, x);
  BesselTable t;
  t.dj = derivatives(j, lmax, x);
  t.dy = derivatives(y, lmax, x);
  t.j.assign(j.begin(), j.begin() + lmax + 1);
  t.y.assign(y.begin(), y.begin() + lmax + 1);
  return t;
}

double spherical_bessel_j(int l, double x) { return spherical_bessel_j_array(l, x)[l]; }

double spherical_bessel_y(int l, double x) {
  check_argument(l, x);
  return bessel_y_upto(std::max(l, 1), x)[l];
}

double spherical_bessel_j_derivative(int l, double x) { return spherical_bessel_table(l, x).dj[l]; }
double spherical_bessel_y_derivative(int l, double x) { return spherical_bessel_table(l, x).dy[l]; }

cdouble spherical_hankel1(int l, double x) {
  check_argument(l, x);
  return {spherical_bessel_j(l, x), spherical_bessel_y(l, x)};
}

cdouble spherical_hankel1_derivative(int l, double x) { return spherical_bessel_table(l, x).dh(l); }

std::vector<double> normalized_legendre_table(int lmax, double theta) {
  if (lmax < 0) throw std::domain_error("normalized_legendre_table: negative degree");
  std::vector<double> p(harmonic_count(lmax), 0.0);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    p[harmonic_index(m, m)] = pmm;
    if (m == lmax) break;
    double prev2 = pmm;
    double prev1 = std::sqrt(2.0 * m + 3.0) * c * pmm;
    p[harmonic_index(m + 1, m)] = prev1;
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double cur = a * (c * prev1 - b * prev2);
      p[harmonic_index(l, m)] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
  return p;
}

std::vector<cdouble> spherical_harmonics(int lmax, double theta, double phi) {
  const auto p = normalized_legendre_table(lmax, theta);
  std::vector<cdouble> y(harmonic_count(lmax));
  for (int m = 0; m <= lmax; ++m) {
    const cdouble e = std::polar(1.0, m * phi);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int l = m; l <= lmax; ++l) {
      const cdouble v = p[harmonic_index(l, m)] * e;
      y[harmonic_index(l, m)] = v;
      if (m > 0) y[harmonic_index(l, -m)] = sign * std::conj(v);
    }
  }
  return y;
}

cdouble spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) {
    throw std::out_of_range("spherical_harmonic: invalid index (l=" + std::to_string(l) +
                            ", m=" + std::to_string(m) + ")");
  }
  const auto p = normalized_legendre_table(l, theta);
  const int am = std::abs(m);
  const cdouble v = p[harmonic_index(l, am)] * std::polar(1.0, am * phi);
  if (m >= 0) return v;
  return ((am % 2 == 0) ? 1.0 : -1.0) * std::conj(v);
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: need at least one node");
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    g.nodes[i] = -z;
    g.nodes[n - 1 - i] = z;
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  return g;
}

}  // namespace nearfield
