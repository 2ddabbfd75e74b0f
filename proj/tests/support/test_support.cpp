#include "test_support.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#ifndef NEARFIELD_FIXTURE_FILE
#error "NEARFIELD_FIXTURE_FILE must point at oracle_fixtures.json"
#endif

namespace nearfield::testing {

const nlohmann::json& fixtures() {
  static const nlohmann::json data = [] {
    std::ifstream in(NEARFIELD_FIXTURE_FILE);
    if (!in) throw std::runtime_error("cannot open " NEARFIELD_FIXTURE_FILE);
    return nlohmann::json::parse(in);
  }();
  return data;
}

const nlohmann::json& fixture(const std::string& name) { return fixtures().at("fixtures").at(name); }

const DefaultSetup& default_setup() {
  static const DefaultSetup setup = [] {
    DefaultSetup s;
    s.solver = std::make_unique<ForwardSolver>(default_scene(), default_potential());
    s.L = assemble_L(s.solver->discretization());
    s.Lstar = assemble_Lstar(s.solver->discretization());
    s.F_direct = s.solver->nearfield_direct().op.matrix;
    s.F_factorized = s.solver->nearfield_factorized(s.L, s.Lstar).op.matrix;
    return s;
  }();
  return setup;
}

CVector random_density(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CVector v(n);
  for (auto& x : v) x = {normal(rng), normal(rng)};
  return v;
}

double relative_error(cdouble value, cdouble reference) {
  const double scale = std::abs(reference);
  return scale > 0.0 ? std::abs(value - reference) / scale : std::abs(value);
}

}  // namespace nearfield::testing
