#include <doctest.h>

#include <cmath>

#include "nearfield/dtn.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/io.hpp"
#include "nearfield/specfun.hpp"
#include "test_support.hpp"

using namespace nearfield;
using nearfield::testing::fixture;

namespace {

RadialPotential from_fixture(const nlohmann::json& f) {
  return {f.at("breakpoints").get<std::vector<double>>(), f.at("values").get<std::vector<double>>()};
}

}  // namespace

TEST_SUITE("dtn") {

TEST_CASE("free interior map at l=0 has the cotangent closed form") {
  const auto& f = fixture("dtn.free_and_exterior_l0");
  const double ref = f.at("f0");
  CHECK(std::abs(dtn_interior_free(0, 2.0, 1.0) - ref) < 1e-13);
  CHECK(std::abs(dtn_interior_free(0, 2.0, 1.0) - (2.0 / std::tan(2.0) - 1.0)) < 1e-13);
}

TEST_CASE("exterior map at l=0 is ik - 1/a") {
  const auto& f = fixture("dtn.free_and_exterior_l0");
  const cdouble ref{f.at("fout")[0].get<double>(), f.at("fout")[1].get<double>()};
  CHECK(std::abs(dtn_exterior(0, 2.0, 1.0) - ref) < 1e-13);
  CHECK(std::abs(dtn_exterior(0, 2.0, 1.0) - cdouble(-1.0, 2.0)) < 1e-13);
}

TEST_CASE("ka at a zero of j_l is a pole") {
  CHECK_THROWS_AS(dtn_interior_free(0, kPi, 1.0), PoleError);
  CHECK_THROWS_AS(dtn_interior_free(1, 4.4934094579090642, 1.0), PoleError);
  CHECK_THROWS_AS(interior_free_diagonal(5, kPi, 1.0), PoleError);
  CHECK_NOTHROW(dtn_interior_free(0, kPi + 1e-3, 1.0));
}

TEST_CASE("free interior map matches a finite-difference normal derivative at l=4") {
  const double k = 2.0, a = 1.0, h = 1e-5;
  const double fd = (spherical_bessel_j(4, k * (a + h)) - spherical_bessel_j(4, k * (a - h))) / (2.0 * h) /
                    spherical_bessel_j(4, k * a);
  CHECK(std::abs(dtn_interior_free(4, k, a) - fd) / std::abs(fd) < 1e-8);
}

TEST_CASE("exterior map matches a finite-difference normal derivative at l=6, k=3") {
  const double k = 3.0, a = 1.0, h = 1e-5;
  const cdouble fd =
      (spherical_hankel1(6, k * (a + h)) - spherical_hankel1(6, k * (a - h))) / (2.0 * h) / spherical_hankel1(6, k * a);
  CHECK(std::abs(dtn_exterior(6, k, a) - fd) / std::abs(fd) < 1e-8);
}

TEST_CASE("exterior map has positive imaginary part given by the Wronskian") {
  for (double k : {1.0, 2.0, 3.0}) {
    const auto fout = exterior_diagonal(40, k, 1.0);
    const auto t = spherical_bessel_table(40, k);
    for (int l = 0; l <= 40; ++l) {
      CHECK(fout[l].imag() > 0.0);
      const double closed = 1.0 / (k * std::norm(t.h(l)));
      CHECK(std::abs(fout[l].imag() - closed) / closed < 1e-13);
    }
  }
}

TEST_CASE("interior maps are real") {
  const auto fn = potential_diagonal(default_potential(), 25, 2.0, 1.0);
  for (const auto& e : fn.entries) CHECK(e.imag() == 0.0);
  for (const auto& e : interior_free_diagonal(25, 2.0, 1.0).entries) CHECK(e.imag() == 0.0);
}

TEST_CASE("potential map reduces to the free map for n = 1") {
  const auto f0 = interior_free_diagonal(25, 2.0, 1.0);
  const auto fn = potential_diagonal(RadialPotential::free_space(), 25, 2.0, 1.0);
  for (int l = 0; l <= 25; ++l) CHECK(std::abs(fn[l] - f0[l]) < 1e-9 * std::max(1.0, std::abs(f0[l])));
}

TEST_CASE("single shell matches the transfer-matrix oracle") {
  const auto& f = fixture("dtn.single_shell");
  const auto pot = from_fixture(f);
  const auto ref = f.at("fn").get<std::vector<double>>();
  for (int l = 0; l < static_cast<int>(ref.size()); ++l) {
    CHECK(std::abs(dtn_potential(pot, l, 2.0, 1.0) - ref[l]) < 1e-8 * std::max(1.0, std::abs(ref[l])));
  }
}

TEST_CASE("default two-shell potential matches the transfer-matrix oracle up to l=40") {
  const auto& f = fixture("dtn.default_two_shell");
  const auto pot = from_fixture(f);
  const auto ref = f.at("fn").get<std::vector<double>>();
  const auto diff = f.at("fn_minus_f0").get<std::vector<double>>();
  const auto fn = potential_diagonal(pot, 40, 2.0, 1.0);
  const auto f0 = interior_free_diagonal(40, 2.0, 1.0);
  for (int l = 0; l <= 40; ++l) {
    CHECK(std::abs(fn[l].real() - ref[l]) < 1e-8 * std::max(1.0, std::abs(ref[l])));
    // The contrast fn - f0 is resolved to its own relative accuracy, down to the rounding of f0.
    const double floor = 1e-14 * std::max(1.0, std::abs(f0[l]));
    CHECK(std::abs((fn[l] - f0[l]).real() - diff[l]) < 1e-6 * std::abs(diff[l]) + floor);
  }
}

TEST_CASE("fourth-order self-convergence under step halving") {
  const auto& f = fixture("dtn.single_shell");
  const auto pot = from_fixture(f);
  const auto ref = f.at("fn").get<std::vector<double>>();
  for (int l : {0, 3, 6, 10}) {
    std::vector<double> err;
    for (int steps : {100, 200, 400}) {
      RadialOptions o;
      o.steps = steps;
      err.push_back(std::abs(dtn_potential(pot, l, 2.0, 1.0, o) - ref[l]));
    }
    const double p1 = std::log2(err[0] / err[1]);
    const double p2 = std::log2(err[1] / err[2]);
    MESSAGE("l=" << l << " observed orders " << p1 << ", " << p2);
    CHECK(p1 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(p2 == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("interior eigenvalue of the potential is a pole") {
  const RadialPotential eig{{0.5}, {3.5991644855795268}};
  CHECK_THROWS_AS(dtn_potential(eig, 0, 2.0, 1.0), PoleError);
  CHECK_NOTHROW(dtn_potential(eig, 1, 2.0, 1.0));
  try {
    dtn_potential(eig, 0, 2.0, 1.0);
  } catch (const PoleError& e) {
    CHECK(e.degree() == 0);
  }
}

TEST_CASE("contrast fn - f0 decays monotonically and falls below 1e-8 before L_max") {
  const SceneConfig s = default_scene();
  const auto fn = potential_diagonal(default_potential(), s.l_max, s.k, s.a);
  const auto f0 = interior_free_diagonal(s.l_max, s.k, s.a);
  int below = -1;
  for (int l = 0; l <= s.l_max; ++l) {
    if (below < 0 && std::abs(fn[l] - f0[l]) < 1e-8) below = l;
  }
  REQUIRE(below >= 0);
  CHECK(below < s.l_max);
  // Monotone from the first degree where the high-l regime sets in.
  const int lstar = 3;
  for (int l = lstar; l < s.l_max; ++l) CHECK(std::abs(fn[l + 1] - f0[l + 1]) < std::abs(fn[l] - f0[l]));
}

TEST_CASE("first-order growth of the free and exterior maps") {
  const int L = 40;
  const double a = 1.0;
  CHECK(dtn_interior_free(L, 2.0, a) / (L / a) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(dtn_exterior(L, 2.0, a).real() / (-(L + 1) / a) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("middle symbol vanishes for the free potential and guards invertibility") {
  const auto f0 = interior_free_diagonal(10, 2.0, 1.0);
  const auto fout = exterior_diagonal(10, 2.0, 1.0);
  for (const auto& m : middle_symbol(f0, fout, f0)) CHECK(std::abs(m) == 0.0);
  HarmonicDiagonal bad = f0;
  bad.entries[3] = fout[3];
  CHECK_THROWS_AS(middle_symbol(f0, fout, bad), InvertibilityError);
}

TEST_CASE("diagonal JSON round trip") {
  const auto fout = exterior_diagonal(6, 2.0, 1.0);
  const auto j = to_json(fout);
  CHECK(j.at("kind") == "Fout");
  CHECK(j.at("entries").size() == 7);
  const auto back = harmonic_diagonal_from_json(j);
  CHECK(back.kind == DtnKind::Fout);
  for (int l = 0; l <= 6; ++l) CHECK(back[l] == fout[l]);
  CHECK(fout.expanded().size() == 49);
}

}  // TEST_SUITE
