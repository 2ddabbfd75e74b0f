// nearfield: batch front end for the forward, synthesis and recovery pipelines.
//
// Exit codes: 0 success, 1 usage or parse error, 2 validation failure,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nearfield/dtn.hpp"
#include "nearfield/emission.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/forward.hpp"
#include "nearfield/inversion.hpp"
#include "nearfield/io.hpp"
#include "nearfield/layer_potentials.hpp"
#include "nearfield/scene.hpp"
#include "nearfield/specfun.hpp"

namespace fs = std::filesystem;
using namespace nearfield;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kNumerical = 3 };

struct Global {
  std::string out = "nearfield_out";
  double tol = 1e-6;
  int lmax = -1;
  std::uint64_t seed = 1;
  bool quiet = false;
  bool json = false;
};

// Raised after a validation report has been printed.
struct ValidationExit {
  std::string error_class;
  std::string message;
};

class Printer {
 public:
  explicit Printer(const Global& g) : g_(g) {}
  bool text() const { return !g_.quiet && !g_.json; }
  void line(const std::string& s) const {
    if (text()) std::cout << s << "\n";
  }
  void result(const json& j) const {
    if (g_.json && !g_.quiet) std::cout << j.dump(2) << "\n";
  }

 private:
  const Global& g_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SceneFile load_with_overrides(const std::string& path, const Global& g) {
  SceneFile sf = load_scene(path);
  if (g.lmax >= 0) sf.scene.l_max = g.lmax;
  return sf;
}

// Runs the standing-assumption checks; prints the table and throws ValidationExit on failure.
void require_valid(const SceneFile& sf, const Printer& out) {
  const ValidationReport report = validate_scene(sf.scene, sf.potential);
  if (report.passed()) return;
  const ValidationCheck* bad = report.first_failure();
  const bool pole = bad->name == "no interior eigenvalue" || bad->name.find("Bessel zero") != std::string::npos;
  if (!out.text()) {
    std::cerr << report.to_string();
  } else {
    std::cout << report.to_string();
  }
  throw ValidationExit{pole ? "PoleError" : "ValidationError", bad->name + ": " + bad->detail};
}

void write_json(const fs::path& file, json body, const RunManifest& m, bool pretty) {
  body["manifest"] = to_json(m);
  write_text_file(file.string(), pretty ? body.dump(2) + "\n" : body.dump() + "\n");
}

fs::path prepare_out(const std::string& dir, const RunManifest& m) {
  fs::path p(dir);
  fs::create_directories(p);
  write_text_file((p / "manifest.json").string(), to_json(m).dump(2) + "\n");
  return p;
}

std::string options_blob(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + ";";
  return s;
}

std::string num(double v) { return fmt("%.17g", v); }

// simulate -------------------------------------------------------------------

int cmd_simulate(const std::string& scene_path, const Global& g) {
  const Printer out(g);
  const SceneFile sf = load_with_overrides(scene_path, g);
  require_valid(sf, out);
  const RunManifest m = make_manifest("simulate", scene_path, g.out,
                                      {scene_to_toml(sf.scene, sf.potential), options_blob({{"tol", num(g.tol)}})});

  const ForwardSolver fw(sf.scene, sf.potential);
  const auto L = assemble_L(fw.discretization());
  const auto Ls = assemble_Lstar(fw.discretization());
  const NearFieldMatrix direct = fw.nearfield_direct();
  const NearFieldMatrix fact = fw.nearfield_factorized(L, Ls);

  const double nd = spectral_norm(direct.op.matrix);
  const double nf = spectral_norm(fact.op.matrix);
  const double diff = spectral_norm(direct.op.matrix - fact.op.matrix);
  const double zero_tol = 1e-10;
  const bool both_zero = nd < zero_tol && nf < zero_tol;
  const double rel = nd > 0.0 ? diff / nd : diff;
  const bool ok = both_zero || rel < g.tol;

  const fs::path dir = prepare_out(g.out, m);
  auto with_manifest = [&](const NearFieldMatrix& f) {
    NearFieldMatrix copy = f;
    copy.metadata["manifest"] = m.hash;
    return to_json(copy);
  };
  write_json(dir / "nearfield_direct.json", with_manifest(direct), m, false);
  write_json(dir / "nearfield_factorized.json", with_manifest(fact), m, false);
  json report = {{"norm_direct", nd},
                 {"norm_factorized", nf},
                 {"absolute_difference", diff},
                 {"relative_discrepancy", rel},
                 {"tolerance", g.tol},
                 {"both_zero", both_zero},
                 {"truncation_tail", fw.truncation_tail()},
                 {"passed", ok}};
  write_json(dir / "simulate_report.json", report, m, true);

  if (both_zero) {
    out.line("both matrices zero to tolerance " + fmt("%.1e", zero_tol) + " (direct " + fmt("%.3e", nd) +
             ", factorized " + fmt("%.3e", nf) + ")");
  } else {
    out.line("||F_direct||      = " + fmt("%.6e", nd));
    out.line("||F_factorized||  = " + fmt("%.6e", nf));
    out.line("relative discrepancy " + fmt("%.3e", rel) + (ok ? " < " : " >= ") + fmt("%.1e", g.tol));
  }
  out.line("wrote " + dir.string() + " (manifest " + m.hash + ")");
  report["manifest"] = to_json(m);
  out.result(report);
  return ok ? kOk : kNumerical;
}

// verify ---------------------------------------------------------------------

struct Check {
  std::string name;
  bool passed;
  double value;
  double tolerance;
};

int cmd_verify(const std::string& scene_path, const Global& g) {
  const Printer out(g);
  const SceneFile sf = load_with_overrides(scene_path, g);
  require_valid(sf, out);
  const SceneConfig& sc = sf.scene;
  std::vector<Check> checks;

  // Wronskian j_l y_l' - j_l' y_l = 1/x^2 at the radii that enter the operators.
  double wr = 0.0;
  for (double x : {sc.k * sc.a, sc.k * sc.rho}) {
    const auto t = spherical_bessel_table(sc.l_max, x);
    for (int l = 0; l <= sc.l_max; ++l) {
      wr = std::max(wr, std::abs((t.j[l] * t.dy[l] - t.dj[l] * t.y[l]) * x * x - 1.0));
    }
  }
  checks.push_back({"Wronskian j y' - j' y = 1/x^2", wr < 1e-10, wr, 1e-10});

  // Im fout = 1 / (k a^2 |h_l(ka)|^2) > 0.
  const HarmonicDiagonal fout = exterior_diagonal(sc.l_max, sc.k, sc.a);
  double im_err = 0.0;
  double im_min = INFINITY;
  const auto t = spherical_bessel_table(sc.l_max, sc.k * sc.a);
  for (int l = 0; l <= sc.l_max; ++l) {
    const double closed = 1.0 / (sc.k * sc.a * sc.a * std::norm(t.h(l)));
    im_err = std::max(im_err, std::abs(fout[l].imag() - closed) / closed);
    im_min = std::min(im_min, fout[l].imag());
  }
  checks.push_back({"Im fout > 0", im_min > 0.0, im_min, 0.0});
  checks.push_back({"Im fout matches Wronskian form", im_err < 1e-12, im_err, 1e-12});

  const ForwardSolver fw(sc, sf.potential);
  const auto L = assemble_L(fw.discretization());
  const auto Ls = assemble_Lstar(fw.discretization());
  const double adj = adjointness_residual(fw.discretization(), L, Ls);
  checks.push_back({"adjointness <L phi, g> = <phi, L* g>", adj < 1e-10, adj, 1e-10});

  const CMatrix Fd = fw.nearfield_direct().op.matrix;
  const CMatrix Ff = fw.nearfield_factorized(L, Ls).op.matrix;
  const double nd = spectral_norm(Fd);
  const double fact = nd > 1e-10 ? relative_spectral_difference(Ff, Fd) : spectral_norm(Ff - Fd);
  checks.push_back({"factorization matches direct", fact < g.tol, fact, g.tol});

  const double tail = fw.truncation_tail();
  checks.push_back({"harmonic truncation tail", tail < 1e-8, tail, 1e-8});

  bool all = true;
  json rows = json::array();
  char head[200];
  std::snprintf(head, sizeof head, "%-40s  %10s  %9s  %s", "check", "value", "tol", "result");
  out.line(head);
  for (const auto& c : checks) {
    all = all && c.passed;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-40s  %10.3e  %9.1e  %s", c.name.c_str(), c.value, c.tolerance,
                  c.passed ? "PASS" : "FAIL");
    out.line(buf);
    rows.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
  }
  out.line(all ? "all checks passed" : "some checks failed");
  out.result({{"passed", all}, {"checks", rows}});
  return all ? kOk : kNumerical;
}

// synthesize -----------------------------------------------------------------

int cmd_synthesize(const std::string& scene_path, const std::string& phi_path, int steps, bool check,
                   const std::string& method, const Global& g) {
  const Printer out(g);
  const SceneFile sf = load_with_overrides(scene_path, g);
  require_valid(sf, out);

  EmissionConfig ec;
  if (steps > 0) ec.steps = steps;
  if (method == "tsvd") {
    ec.regularization = RegularizationKind::TruncatedSvd;
  } else if (method != "tikhonov") {
    throw CLI::ValidationError("--method", "expected tikhonov or tsvd");
  }

  const ForwardSolver fw(sf.scene, sf.potential);
  const auto& disc = fw.discretization();
  CVector phi;
  std::string phi_blob;
  if (!phi_path.empty()) {
    phi_blob = read_text_file(phi_path);
    try {
      phi = complex_vector_from_json(json::parse(phi_blob));
    } catch (const json::exception& e) {
      throw ParseError(phi_path + ": " + e.what());
    }
    if (phi.size() != disc.node_count()) {
      throw ParseError(phi_path + ": expected " + std::to_string(disc.node_count()) + " node values");
    }
  } else {
    std::mt19937_64 rng(g.seed);
    std::normal_distribution<double> normal;
    phi.resize(disc.node_count());
    for (auto& v : phi) v = {normal(rng), normal(rng)};
  }
  const RunManifest m = make_manifest(
      "synthesize", scene_path, g.out,
      {scene_to_toml(sf.scene, sf.potential), phi_blob,
       options_blob({{"seed", std::to_string(g.seed)}, {"steps", std::to_string(ec.steps)}, {"method", method},
                     {"check", check ? "1" : "0"}})});

  const EmissionSynthesizer synth(sf.scene, disc.source, ec);
  std::optional<NearFieldCheck> nf;
  if (check) {
    const CMatrix F = fw.nearfield_direct().op.matrix;
    nf = NearFieldCheck{[&fw](const CVector& psi) { return fw.emitted_scattered_trace(psi); }, F * phi};
  }
  const auto path = synth.path(phi, nf ? &*nf : nullptr);

  const fs::path dir = prepare_out(g.out, m);
  const fs::path csv = dir / "synthesis_path.csv";
  write_text_file(csv.string(), "# manifest " + m.hash + "\n" + synthesis_path_csv(path));
  write_json(dir / "phi.json", to_json(phi), m, false);

  bool monotone = true;
  double best = INFINITY;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0 && path[i].residual_h32 > path[i - 1].residual_h32) monotone = false;
    if (path[i].relative_nearfield_error >= 0.0) best = std::min(best, path[i].relative_nearfield_error);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%3d  %12.4e  residual %10.3e  nearfield %10.3e%s", path[i].step,
                  path[i].parameter, path[i].relative_residual, path[i].relative_nearfield_error,
                  path[i].plateau ? "  plateau" : "");
    out.line(buf);
  }
  out.line(std::string("residual monotone: ") + (monotone ? "yes" : "no"));
  out.line("wrote " + csv.string());
  json summary = {{"csv", csv.string()}, {"monotone", monotone}, {"manifest", to_json(m)}};
  if (std::isfinite(best)) summary["best_relative_nearfield_error"] = best;
  out.result(summary);
  // The path file is the product; a stalled residual is reported, not fatal.
  return kOk;
}

// recover --------------------------------------------------------------------

int cmd_recover(const std::string& scene_path, const std::string& nearfield_path, const std::string& tmpl_spec,
                int l_rec, double tau, const Global& g) {
  const Printer out(g);
  const SceneFile sf = load_with_overrides(scene_path, g);
  require_valid(sf, out);
  const FitTemplate tmpl = parse_fit_template(tmpl_spec);

  const Discretization disc = Discretization::from_scene(sf.scene);
  const auto L = assemble_L(disc);
  const auto Ls = assemble_Lstar(disc);
  NearFieldMatrix data;
  std::string data_blob;
  if (!nearfield_path.empty()) {
    data_blob = read_text_file(nearfield_path);
    try {
      data = nearfield_from_json(json::parse(data_blob));
    } catch (const json::exception& e) {
      throw ParseError(nearfield_path + ": " + e.what());
    }
    if (data.op.row_space != disc.source_space() || data.op.col_space != disc.source_space()) {
      throw ValidationError(nearfield_path + ": operator lives on '" + data.op.row_space + "', scene expects '" +
                            disc.source_space() + "'");
    }
  } else {
    data = ForwardSolver(sf.scene, sf.potential).nearfield_factorized(L, Ls);
  }
  const RunManifest m = make_manifest(
      "recover", scene_path, g.out,
      {scene_to_toml(sf.scene, sf.potential), data_blob,
       options_blob({{"template", tmpl_spec}, {"l_rec", std::to_string(l_rec)}, {"tau", num(tau)}})});

  RecoveryConfig rc;
  rc.svd_threshold = tau;
  rc.l_rec = l_rec;
  const RecoveredMiddle mid = recover_middle(disc, data.op.matrix, L, Ls, rc);
  const HarmonicDiagonal f0 = interior_free_diagonal(sf.scene.l_max, sf.scene.k, sf.scene.a, sf.scene.delta_eig);
  const HarmonicDiagonal fout = exterior_diagonal(sf.scene.l_max, sf.scene.k, sf.scene.a);
  const RecoveredDtn rd = recover_dtn(mid.M.matrix, f0, fout, mid.l_rec);
  out.line("trusted degree l_rec = " + std::to_string(mid.l_rec) + " (retained modes " +
           std::to_string(mid.retained_L) + "/" + std::to_string(mid.retained_Lstar) + ", fit condition " +
           fmt("%.2e", mid.design_condition) + ")");
  out.line("consistency residual " + fmt("%.3e", mid.residual) + ", leakage " + fmt("%.3e", rd.leakage));

  const fs::path dir = prepare_out(g.out, m);
  json dtn = to_json(rd.fn);
  dtn["l_rec"] = mid.l_rec;
  dtn["leakage"] = rd.leakage;
  dtn["residual"] = mid.residual;
  write_json(dir / "recovered_dtn.json", dtn, m, true);

  FitResult fit;
  bool converged = true;
  std::string failure;
  try {
    fit = fit_potential(rd.fn, mid.l_rec, tmpl, rc.fit);
  } catch (const FitNonConvergence& e) {
    fit = e.best();
    converged = false;
    failure = e.what();
  }
  json report = to_json(fit);
  report["l_rec"] = mid.l_rec;
  report["template"] = tmpl_spec;
  write_json(dir / "fit_report.json", report, m, true);
  std::ostringstream csv;
  csv << "# manifest " << m.hash << "\niteration,misfit,step\n";
  for (const auto& it : fit.log) csv << it.iteration << "," << num(it.misfit) << "," << it.step << "\n";
  write_text_file((dir / "fit_log.csv").string(), csv.str());

  std::string params;
  for (double p : fit.parameters) params += " " + fmt("%.6f", p);
  out.line("fitted parameters (values, free breakpoints):" + params);
  out.line("misfit " + fmt("%.3e", fit.misfit) + " after " + std::to_string(fit.iterations) + " iterations");
  out.line("wrote " + dir.string() + " (manifest " + m.hash + ")");
  report.erase("log");
  report["manifest"] = to_json(m);
  out.result(report);
  if (!converged) throw NonConvergence(failure);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field scattering toolkit: forward simulation, emission synthesis, potential recovery"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--tol", g.tol, "Relative tolerance for the factorization check")->check(CLI::PositiveNumber);
  app.add_option("--lmax", g.lmax, "Override the harmonic truncation degree")->check(CLI::Range(0, 60));
  app.add_option("--seed", g.seed, "Seed for random densities");
  app.add_flag("--quiet", g.quiet, "Print nothing on success");
  app.add_flag("--json", g.json, "Print a JSON summary instead of text");

  std::string scene;
  auto* sim = app.add_subcommand("simulate", "Compute F_S directly and through its factorization");
  sim->add_option("scene", scene, "Scene TOML")->required();

  auto* ver = app.add_subcommand("verify", "Run the invariant suite and print a pass/fail table");
  ver->add_option("scene", scene, "Scene TOML")->required();

  std::string phi_path;
  int steps = 0;
  bool no_check = false;
  std::string method = "tikhonov";
  auto* syn = app.add_subcommand("synthesize", "Regularization path for an outgoing density matching phi");
  syn->add_option("scene", scene, "Scene TOML")->required();
  syn->add_option("--phi", phi_path, "JSON {re, im} node values on S (random if omitted)");
  syn->add_option("--steps", steps, "Number of path steps")->check(CLI::PositiveNumber);
  syn->add_option("--method", method, "tikhonov or tsvd");
  syn->add_flag("--no-check", no_check, "Skip the near-field comparison");

  std::string nearfield_path;
  std::string tmpl = "breakpoints=0.35,0.75;values=1.2,1.0";
  int l_rec = -1;
  double tau = 1e-10;
  auto* rec = app.add_subcommand("recover", "Recover F_n from near-field data and fit a shell model");
  rec->add_option("scene", scene, "Scene TOML (geometry; its potential generates data if --nearfield is absent)")
      ->required();
  rec->add_option("--nearfield", nearfield_path, "NearFieldMatrix JSON");
  rec->add_option("--template", tmpl, "Fit template, e.g. breakpoints=0.35,0.75;values=1.2,1.0;fixed=0,0");
  rec->add_option("--lrec", l_rec, "Trusted degree (-1: automatic)");
  rec->add_option("--tau", tau, "Relative singular-value cutoff")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(scene, g);
    if (*ver) return cmd_verify(scene, g);
    if (*syn) return cmd_synthesize(scene, phi_path, steps, !no_check, method, g);
    if (*rec) return cmd_recover(scene, nearfield_path, tmpl, l_rec, tau, g);
  } catch (const ValidationExit& e) {
    std::cerr << e.error_class << ": " << e.message << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "ParseError: " << e.what();
    const std::string tag = ":" + std::to_string(e.line()) + ":";
    if (e.line() > 0 && std::string(e.what()).find(tag) == std::string::npos) std::cerr << " (line " << e.line() << ")";
    std::cerr << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const GeometryError& e) {
    std::cerr << "GeometryError: " << e.what() << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "ValidationError: " << e.what() << "\n";
    return kInvalid;
  } catch (const PoleError& e) {
    std::cerr << "PoleError: " << e.what() << "\n";
    return kInvalid;
  } catch (const RankError& e) {
    std::cerr << "RankError: " << e.what() << "\n";
    return kNumerical;
  } catch (const NonConvergence& e) {
    std::cerr << "NonConvergence: " << e.what() << "\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "NumericalError: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
