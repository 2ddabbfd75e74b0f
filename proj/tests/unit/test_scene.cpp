#include <doctest.h>

#include "nearfield/errors.hpp"
#include "nearfield/scene.hpp"

using namespace nearfield;

namespace {

const ValidationCheck* find(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const char* kGood = R"([scene]
k = 2.0
a = 1.0
rho = 0.5
center = [3.0, 0.0, 0.0]
l_max = 25
n_quad_s = 600

[potential]
breakpoints = [0.4, 0.7]
values = [1.5, 0.8]
)";

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("free scatterer in the default geometry passes every check") {
  const auto r = validate_scene(default_scene(), RadialPotential::free_space());
  CHECK(r.passed());
  CHECK(r.checks.size() == 5);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.margin > 0.0, c.name);
}

TEST_CASE("default two-shell scene passes") { CHECK(validate_scene(default_scene(), default_potential()).passed()); }

TEST_CASE("k a at a zero of j0 fails") {
  SceneConfig s = default_scene();
  s.k = kPi;
  s.l_max = 0;
  const auto r = validate_scene(s, RadialPotential::free_space());
  CHECK_FALSE(r.passed());
  REQUIRE(find(r, "k a not a Bessel zero"));
  CHECK_FALSE(find(r, "k a not a Bessel zero")->passed);
  CHECK(find(r, "k a not a Bessel zero")->margin < 1e-6);
}

TEST_CASE("k rho at a Bessel zero fails") {
  SceneConfig s = default_scene();
  s.rho = kPi / s.k;
  s.center = {4.0, 0.0, 0.0};
  const auto r = validate_scene(s, RadialPotential::free_space());
  REQUIRE(find(r, "k rho not a Bessel zero"));
  CHECK_FALSE(find(r, "k rho not a Bessel zero")->passed);
}

TEST_CASE("overlapping balls are a geometry error") {
  SceneConfig s = default_scene();
  s.center = {1.4, 0.0, 0.0};
  CHECK_THROWS_AS(validate_scene(s, RadialPotential::free_space()), GeometryError);
}

TEST_CASE("bad parameters are rejected") {
  SceneConfig s = default_scene();
  s.k = -1.0;
  CHECK_THROWS_AS(validate_scene(s, RadialPotential::free_space()), ValidationError);
  s = default_scene();
  s.l_max = 61;
  CHECK_THROWS_AS(validate_scene(s, RadialPotential::free_space()), ValidationError);
}

TEST_CASE("potential reaching the boundary fails the support check") {
  const auto r = validate_scene(default_scene(), {{0.4, 1.2}, {1.5, 0.8}});
  REQUIRE(find(r, "potential support"));
  CHECK_FALSE(find(r, "potential support")->passed);
  CHECK_THROWS_AS(check_potential({{0.5, 0.3}, {1.0, 2.0}}, 1.0), ValidationError);
}

TEST_CASE("interior eigenvalue is detected") {
  const RadialPotential eig{{0.5}, {3.5991644855795268}};
  const auto r = validate_scene(default_scene(), eig);
  REQUIRE(find(r, "no interior eigenvalue"));
  CHECK_FALSE(find(r, "no interior eigenvalue")->passed);
}

TEST_CASE("validation is deterministic") {
  const auto a = validate_scene(default_scene(), default_potential());
  const auto b = validate_scene(default_scene(), default_potential());
  CHECK(a.to_string() == b.to_string());
}

TEST_CASE("piecewise potential values") {
  const RadialPotential two = default_potential();
  CHECK(evaluate_potential(RadialPotential::free_space(), 0.3) == 1.0);
  CHECK(evaluate_potential(RadialPotential::free_space(), 7.0) == 1.0);
  CHECK(evaluate_potential(two, 0.0) == 1.5);
  CHECK(evaluate_potential(two, 0.55) == 0.8);
  CHECK(evaluate_potential(two, 0.9) == 1.0);
}

TEST_CASE("breakpoints belong to the outer shell") {
  const RadialPotential two = default_potential();
  CHECK(evaluate_potential(two, 0.4) == 0.8);
  CHECK(evaluate_potential(two, 0.7) == 1.0);
  // Right-continuity: the value at a breakpoint equals the limit from above.
  for (double b : two.breakpoints) CHECK(evaluate_potential(two, b) == evaluate_potential(two, b + 1e-12));
}

TEST_CASE("Bessel zero distance") {
  int l = -1;
  CHECK(distance_to_bessel_zero(3, kPi + 0.01, &l) == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(l == 0);
  CHECK(distance_to_bessel_zero(0, 4.4934094579090642, &l) > 1.0);  // zero of j1, not of j0
  CHECK(distance_to_bessel_zero(1, 4.4934094579090642, &l) < 1e-9);
  CHECK(l == 1);
}

TEST_CASE("TOML scene round trip") {
  const SceneFile f = parse_scene(kGood);
  CHECK(f.scene.k == 2.0);
  CHECK(f.scene.center.x == 3.0);
  CHECK(f.scene.l_max == 25);
  CHECK(f.potential.values == std::vector<double>{1.5, 0.8});
  const SceneFile g = parse_scene(scene_to_toml(f.scene, f.potential));
  CHECK(scene_to_toml(g.scene, g.potential) == scene_to_toml(f.scene, f.potential));
  CHECK(scene_hash(f.scene, f.potential) == scene_hash(g.scene, g.potential));
  CHECK(hex_digest(scene_hash(f.scene, f.potential)).size() == 16);
}

TEST_CASE("hash changes with any parameter") {
  SceneConfig s = default_scene();
  const auto h = scene_hash(s, default_potential());
  s.k = 2.0000001;
  CHECK(scene_hash(s, default_potential()) != h);
  CHECK(scene_hash(default_scene(), RadialPotential::free_space()) != h);
}

TEST_CASE("unknown keys are rejected with their line") {
  std::string text = kGood;
  text.insert(text.find("l_max"), "colour = 3\n");
  try {
    parse_scene(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry a line number") {
  const char* bad = "[scene]\nk = 2.0\na = 1.0\nrho = 0.5\ncenter = [3.0, 0.0, 0.0\nl_max = 25\n";
  try {
    parse_scene(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 5);
  }
}

TEST_CASE("missing and mistyped keys") {
  CHECK_THROWS_AS(parse_scene("[scene]\nk = 2.0\na = 1.0\nrho = 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_scene("[scene]\nk = \"two\"\na = 1.0\nrho = 0.5\ncenter = [3.0, 0.0, 0.0]\n"), ParseError);
  CHECK_THROWS_AS(parse_scene("[scene]\nk = 2.0\na = 1.0\nrho = 0.5\ncenter = [3.0, 0.0]\n"), ParseError);
  CHECK_THROWS_AS(parse_scene("[other]\nx = 1\n"), ParseError);
}

TEST_CASE("optional keys default sensibly") {
  const SceneFile f = parse_scene("[scene]\nk = 2\na = 1\nrho = 0.5\ncenter = [3, 0, 0]\n");
  CHECK(f.scene.l_max == default_scene().l_max);
  CHECK(f.scene.eps_ball == default_scene().eps_ball);
  CHECK(f.potential.is_free());
}

}  // TEST_SUITE
