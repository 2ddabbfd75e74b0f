#include "nearfield/scene.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "nearfield/errors.hpp"
#include "nearfield/radial.hpp"
#include "nearfield/specfun.hpp"

namespace nearfield {

bool RadialPotential::is_free() const {
  for (double v : values) {
    if (v != 1.0) return false;
  }
  return true;
}

SceneConfig default_scene() { return SceneConfig{}; }

RadialPotential default_potential() { return {{0.4, 0.7}, {1.5, 0.8}}; }

double evaluate_potential(const RadialPotential& potential, double r) {
  for (std::size_t j = 0; j < potential.breakpoints.size(); ++j) {
    if (r < potential.breakpoints[j]) return potential.values[j];
  }
  return 1.0;
}

void check_potential(const RadialPotential& potential, double a) {
  if (potential.breakpoints.size() != potential.values.size()) {
    throw ValidationError("potential: breakpoints and values differ in length");
  }
  double prev = 0.0;
  for (std::size_t j = 0; j < potential.breakpoints.size(); ++j) {
    const double b = potential.breakpoints[j];
    if (!std::isfinite(b) || !(b > prev)) {
      throw ValidationError("potential: breakpoints must be positive and strictly increasing");
    }
    if (!std::isfinite(potential.values[j])) throw ValidationError("potential: non-finite value");
    prev = b;
  }
  if (prev >= a) throw ValidationError("potential: support must lie strictly inside the scatterer ball");
}

bool ValidationReport::passed() const { return first_failure() == nullptr; }

const ValidationCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(28) << c.name << " margin="
       << std::setprecision(6) << c.margin;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  return os.str();
}

double distance_to_bessel_zero(int lmax, double x, int* degree) {
  const double lo = std::max(1e-3, x - 4.0);
  const double hi = x + 4.0;
  const int samples = 160;
  double best = std::numeric_limits<double>::infinity();
  int best_l = -1;

  std::vector<std::vector<double>> table(samples + 1);
  std::vector<double> t(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    t[i] = lo + (hi - lo) * i / samples;
    table[i] = spherical_bessel_j_array(lmax, t[i]);
  }
  for (int l = 0; l <= lmax; ++l) {
    for (int i = 0; i < samples; ++i) {
      double fa = table[i][l];
      double fb = table[i + 1][l];
      double za;
      if (fa == 0.0) {
        za = t[i];
      } else if (fa * fb < 0.0) {
        double x0 = t[i];
        double x1 = t[i + 1];
        for (int it = 0; it < 200 && x1 - x0 > 1e-15 * x1; ++it) {
          const double xm = 0.5 * (x0 + x1);
          const double fm = spherical_bessel_j(l, xm);
          if ((fm < 0.0) == (fa < 0.0)) {
            x0 = xm;
            fa = fm;
          } else {
            x1 = xm;
          }
        }
        za = 0.5 * (x0 + x1);
      } else {
        continue;
      }
      const double d = std::abs(za - x);
      if (d < best) {
        best = d;
        best_l = l;
      }
    }
  }
  if (degree) *degree = best_l;
  return best;
}

ValidationReport validate_scene(const SceneConfig& config, const RadialPotential& potential) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, double margin, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, margin, std::move(detail)});
  };

  const bool params_ok = config.k > 0.0 && config.a > 0.0 && config.rho > 0.0 && config.l_max >= 0 &&
                         config.l_max <= 60 && config.n_quad_s > 0 && config.eps_ball > 0.0 &&
                         std::isfinite(config.k) && std::isfinite(config.a) && std::isfinite(config.rho);
  if (!params_ok) {
    throw ValidationError("scene: k, a, rho, eps_ball must be positive, 0 <= l_max <= 60, n_quad_s > 0");
  }

  const double gap = config.center.norm() - config.a - config.rho;
  if (!(gap > 0.0)) {
    std::ostringstream os;
    os << "balls overlap: |c| = " << config.center.norm() << " <= a + rho = " << config.a + config.rho;
    throw GeometryError(os.str());
  }
  add("disjoint balls", true, gap, "|c| - a - rho");

  bool potential_ok = true;
  try {
    check_potential(potential, config.a);
    add("potential support", true, config.a - potential.support_radius(), "a - r_J");
  } catch (const ValidationError& e) {
    potential_ok = false;
    add("potential support", false, 0.0, e.what());
  }

  auto zero_check = [&](const char* name, double x) {
    int l = -1;
    const double d = distance_to_bessel_zero(config.l_max, x, &l);
    std::ostringstream os;
    os << "nearest zero of j_" << l << " at distance " << d;
    add(name, d > config.delta_eig, d, os.str());
  };
  zero_check("k a not a Bessel zero", config.k * config.a);
  zero_check("k rho not a Bessel zero", config.k * config.rho);

  if (potential_ok) {
    double worst = 0.0;
    int worst_l = 0;
    RadialOptions opts;
    opts.source_integral = false;
    for (int l = 0; l <= config.l_max; ++l) {
      const double lr = solve_regular(potential, l, config.k, config.a, opts).log_pole_ratio;
      if (l == 0 || lr < worst) {
        worst = lr;
        worst_l = l;
      }
    }
    const double ratio = std::exp(worst);
    std::ostringstream os;
    os << "min |w(a)|/max|w| = " << ratio << " at l = " << worst_l;
    add("no interior eigenvalue", ratio >= 1e-8, ratio, os.str());
  }
  return report;
}

namespace {

[[noreturn]] void fail_at(const toml::node& node, const std::string& msg) {
  throw ParseError(msg, static_cast<int>(node.source().begin.line));
}

double read_number(const toml::node& node, const std::string& key) {
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_integer()) return static_cast<double>(v->get());
  fail_at(node, "'" + key + "' must be a number");
}

int read_integer(const toml::node& node, const std::string& key) {
  if (auto v = node.as_integer()) return static_cast<int>(v->get());
  fail_at(node, "'" + key + "' must be an integer");
}

std::vector<double> read_numbers(const toml::node& node, const std::string& key) {
  const auto* arr = node.as_array();
  if (!arr) fail_at(node, "'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& el : *arr) out.push_back(read_number(el, key));
  return out;
}

}  // namespace

SceneFile parse_scene(std::string_view text, std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source_name << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ParseError(os.str(), static_cast<int>(e.source().begin.line));
  }

  SceneFile out;
  out.scene = default_scene();
  out.potential = RadialPotential::free_space();
  bool have_scene = false;

  for (auto&& [key, node] : root) {
    const std::string name(key.str());
    if (name == "scene") {
      const auto* tbl = node.as_table();
      if (!tbl) fail_at(node, "'scene' must be a table");
      have_scene = true;
      std::set<std::string> seen;
      for (auto&& [skey, snode] : *tbl) {
        const std::string s(skey.str());
        seen.insert(s);
        if (s == "k") {
          out.scene.k = read_number(snode, s);
        } else if (s == "a") {
          out.scene.a = read_number(snode, s);
        } else if (s == "rho") {
          out.scene.rho = read_number(snode, s);
        } else if (s == "center") {
          const auto c = read_numbers(snode, s);
          if (c.size() != 3) fail_at(snode, "'center' must have three components");
          out.scene.center = {c[0], c[1], c[2]};
        } else if (s == "l_max") {
          out.scene.l_max = read_integer(snode, s);
        } else if (s == "n_quad_s") {
          out.scene.n_quad_s = read_integer(snode, s);
        } else if (s == "eps_ball") {
          out.scene.eps_ball = read_number(snode, s);
        } else if (s == "delta_eig") {
          out.scene.delta_eig = read_number(snode, s);
        } else if (s == "boundary_quad_order") {
          out.scene.boundary_quad_order = read_integer(snode, s);
        } else {
          fail_at(snode, "unknown key 'scene." + s + "'");
        }
      }
      for (const char* required : {"k", "a", "rho", "center"}) {
        if (!seen.count(required)) {
          throw ParseError(std::string(source_name) + ": missing required key 'scene." + required + "'",
                           static_cast<int>(node.source().begin.line));
        }
      }
    } else if (name == "potential") {
      const auto* tbl = node.as_table();
      if (!tbl) fail_at(node, "'potential' must be a table");
      for (auto&& [pkey, pnode] : *tbl) {
        const std::string s(pkey.str());
        if (s == "breakpoints") {
          out.potential.breakpoints = read_numbers(pnode, s);
        } else if (s == "values") {
          out.potential.values = read_numbers(pnode, s);
        } else {
          fail_at(pnode, "unknown key 'potential." + s + "'");
        }
      }
      if (out.potential.breakpoints.size() != out.potential.values.size()) {
        fail_at(node, "'potential.breakpoints' and 'potential.values' differ in length");
      }
    } else {
      fail_at(node, "unknown table or key '" + name + "'");
    }
  }
  if (!have_scene) throw ParseError(std::string(source_name) + ": missing [scene] table", 1);
  return out;
}

SceneFile load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scene file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

}  // namespace

std::string scene_to_toml(const SceneConfig& c, const RadialPotential& p) {
  std::ostringstream os;
  os << "[scene]\n"
     << "k = " << fmt(c.k) << "\n"
     << "a = " << fmt(c.a) << "\n"
     << "rho = " << fmt(c.rho) << "\n"
     << "center = " << fmt_list({c.center.x, c.center.y, c.center.z}) << "\n"
     << "l_max = " << c.l_max << "\n"
     << "n_quad_s = " << c.n_quad_s << "\n"
     << "eps_ball = " << fmt(c.eps_ball) << "\n"
     << "delta_eig = " << fmt(c.delta_eig) << "\n"
     << "boundary_quad_order = " << c.boundary_quad_order << "\n\n"
     << "[potential]\n"
     << "breakpoints = " << fmt_list(p.breakpoints) << "\n"
     << "values = " << fmt_list(p.values) << "\n";
  return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t scene_hash(const SceneConfig& config, const RadialPotential& potential) {
  return fnv1a64(scene_to_toml(config, potential));
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nearfield
