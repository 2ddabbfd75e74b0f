#include <doctest.h>

#include <cmath>

#include "nearfield/quadrature.hpp"
#include "nearfield/specfun.hpp"
#include "test_support.hpp"

using namespace nearfield;
using nearfield::testing::fixture;

TEST_SUITE("specfun") {

TEST_CASE("j0 vanishes at pi") { CHECK(std::abs(spherical_bessel_j(0, kPi)) < 1e-12); }

TEST_CASE("j1 tends to zero at the origin") {
  CHECK(std::abs(spherical_bessel_j(1, 1e-10)) < 1e-10);
  CHECK(spherical_bessel_j(1, 1e-10) == doctest::Approx(1e-10 / 3.0).epsilon(1e-12));
}

TEST_CASE("j2 at 1 matches the power-series oracle") {
  const auto& f = fixture("specfun.j2_at_1");
  const double ref = f.at("value");
  CHECK(std::abs(spherical_bessel_j(2, 1.0) - ref) / std::abs(ref) < 1e-13);
}

TEST_CASE("non-positive arguments are domain errors") {
  CHECK_THROWS_AS(spherical_bessel_j(0, 0.0), std::domain_error);
  CHECK_THROWS_AS(spherical_bessel_y(2, -1.0), std::domain_error);
  CHECK_THROWS_AS(spherical_hankel1(1, 0.0), std::domain_error);
  CHECK_THROWS_AS(spherical_bessel_j(-1, 1.0), std::domain_error);
}

TEST_CASE("h0 closed form") {
  const cdouble h = spherical_hankel1(0, 1.0);
  const cdouble ref = -kI * std::exp(kI);
  CHECK(std::abs(h - ref) < 1e-14);
  // h_0'(x) = (x i - 1) e^{ix} / x^2 * (-i)
  const double x = 2.7;
  const cdouble dref = -kI * std::exp(kI * x) * (kI * x - 1.0) / (x * x);
  CHECK(std::abs(spherical_hankel1_derivative(0, x) - dref) < 1e-14);
}

TEST_CASE("Wronskian at l=5, x=2.3") {
  const double x = 2.3;
  const double w = spherical_bessel_j(5, x) * spherical_bessel_y_derivative(5, x) -
                   spherical_bessel_j_derivative(5, x) * spherical_bessel_y(5, x);
  CHECK(std::abs(w * x * x - 1.0) < 1e-12);
}

TEST_CASE("h3 at 4 matches the dual-recurrence oracle") {
  const auto& f = fixture("specfun.h3_at_4");
  const auto t = spherical_bessel_table(3, 4.0);
  CHECK(std::abs(t.j[3] - f.at("j").get<double>()) < 1e-14);
  CHECK(std::abs(t.y[3] - f.at("y").get<double>()) < 1e-14);
  CHECK(std::abs(t.dj[3] - f.at("dj").get<double>()) < 1e-14);
  CHECK(std::abs(t.dy[3] - f.at("dy").get<double>()) < 1e-14);
  const cdouble h = spherical_hankel1(3, 4.0);
  CHECK(h.real() == doctest::Approx(f.at("j").get<double>()).epsilon(1e-13));
  CHECK(h.imag() == doctest::Approx(f.at("y").get<double>()).epsilon(1e-13));
}

TEST_CASE("Wronskian holds for all degrees up to 60 on [0.1, 50]") {
  double worst = 0.0;
  for (double x = 0.1; x <= 50.0; x *= 1.13) {
    const auto t = spherical_bessel_table(60, x);
    for (int l = 0; l <= 60; ++l) {
      const double w = (t.j[l] * t.dy[l] - t.dj[l] * t.y[l]) * x * x;
      worst = std::max(worst, std::abs(w - 1.0));
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("three-term recurrence is consistent for j and y") {
  double worst = 0.0;
  for (double x : {0.3, 1.0, 2.0, 5.5, 17.0, 42.0}) {
    const auto t = spherical_bessel_table(41, x);
    for (int l = 1; l < 41; ++l) {
      for (const auto* f : {&t.j, &t.y}) {
        const double lhs = (*f)[l - 1] + (*f)[l + 1];
        const double rhs = (2 * l + 1) / x * (*f)[l];
        const double scale = std::max({std::abs((*f)[l - 1]), std::abs((*f)[l + 1]), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("j stays accurate where upward recurrence would fail") {
  // Power series with 40 terms is exact to double precision for x <= 1.
  for (int l : {10, 25, 40, 60}) {
    const double x = 0.7;
    double term = std::pow(x, l);
    for (int i = 1; i <= 2 * l + 1; i += 2) term /= i;
    double sum = 0.0;
    for (int p = 0; p < 40; ++p) {
      sum += term;
      term *= -x * x / (2.0 * (p + 1) * (2 * l + 2 * p + 3));
    }
    CHECK(spherical_bessel_j(l, x) == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("constant harmonic") {
  CHECK(std::abs(spherical_harmonic(0, 0, 0.4, 2.0) - 1.0 / std::sqrt(4.0 * kPi)) < 1e-15);
}

TEST_CASE("harmonics match the mpmath oracle") {
  for (const auto& s : fixture("specfun.ylm_samples").at("samples")) {
    const cdouble ref{s.at("value")[0].get<double>(), s.at("value")[1].get<double>()};
    const cdouble y = spherical_harmonic(s.at("l"), s.at("m"), s.at("theta"), s.at("phi"));
    CHECK(std::abs(y - ref) < 1e-13);
  }
}

TEST_CASE("conjugation symmetry") {
  for (double th : {0.2, 1.3, 2.9}) {
    for (double ph : {-1.0, 0.5, 4.4}) {
      const auto y = spherical_harmonics(12, th, ph);
      for (int l = 0; l <= 12; ++l) {
        for (int m = -l; m <= l; ++m) {
          const double sign = (m % 2 == 0) ? 1.0 : -1.0;
          CHECK(std::abs(std::conj(y[harmonic_index(l, m)]) - sign * y[harmonic_index(l, -m)]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("invalid order is an index error") {
  CHECK_THROWS_AS(spherical_harmonic(2, 3, 0.1, 0.1), std::out_of_range);
  CHECK_THROWS_AS(spherical_harmonic(-1, 0, 0.1, 0.1), std::out_of_range);
}

TEST_CASE("packed tables agree with single evaluations") {
  const auto y = spherical_harmonics(9, 1.1, -0.3);
  for (int l = 0; l <= 9; ++l) {
    for (int m = -l; m <= l; ++m) CHECK(std::abs(y[harmonic_index(l, m)] - spherical_harmonic(l, m, 1.1, -0.3)) < 1e-15);
  }
  for (int q = 0; q < harmonic_count(9); ++q) CHECK(harmonic_index(harmonic_from_index(q).l, harmonic_from_index(q).m) == q);
}

TEST_CASE("Gram matrix of degree <= 8 harmonics is the identity") {
  const auto rule = make_sphere_quadrature(18, 36);
  const int n = harmonic_count(8);
  CMatrix B(rule.size(), n);
  RVector w(rule.size());
  for (int i = 0; i < rule.n_theta; ++i) {
    for (int j = 0; j < rule.n_phi; ++j) {
      const auto y = spherical_harmonics(8, rule.theta[i], rule.phi[j]);
      for (int q = 0; q < n; ++q) B(i * rule.n_phi + j, q) = y[q];
      w[i * rule.n_phi + j] = rule.weight(i);
    }
  }
  const CMatrix G = B.adjoint() * w.asDiagonal() * B;
  CHECK((G - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("quadrature integrates products of harmonics up to degree 2 L_max") {
  // Colatitude part: for each order m the normalised Legendre functions of
  // degree m..50 are orthonormal under the Gauss rule (times 2 pi).
  const int top = 2 * default_scene().l_max;
  const auto rule = make_sphere_quadrature(top + 1, 2 * top + 2);
  std::vector<std::vector<double>> p(rule.n_theta);
  for (int i = 0; i < rule.n_theta; ++i) p[i] = normalized_legendre_table(top, rule.theta[i]);
  double worst = 0.0;
  for (int m = 0; m <= top; ++m) {
    for (int l1 = m; l1 <= top; ++l1) {
      for (int l2 = l1; l2 <= top; ++l2) {
        double s = 0.0;
        for (int i = 0; i < rule.n_theta; ++i) {
          s += rule.gl_weight[i] * p[i][harmonic_index(l1, m)] * p[i][harmonic_index(l2, m)];
        }
        worst = std::max(worst, std::abs(2.0 * kPi * s - (l1 == l2 ? 1.0 : 0.0)));
      }
    }
  }
  CHECK(worst < 1e-10);
  // Azimuth part: the trapezoid rule separates every pair of orders within the degree range.
  double leak = 0.0;
  for (int dm = 1; dm <= 2 * top; ++dm) {
    cdouble s = 0.0;
    for (double ph : rule.phi) s += std::polar(1.0, dm * ph);
    leak = std::max(leak, std::abs(s) / rule.n_phi);
  }
  CHECK(leak < 1e-12);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const auto g = gauss_legendre(7);
  for (int p = 0; p <= 13; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
    const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
    CHECK(std::abs(s - exact) < 1e-14);
  }
}

}  // TEST_SUITE
