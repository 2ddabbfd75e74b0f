#include "nearfield/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nearfield/errors.hpp"

#ifndef NEARFIELD_VERSION
#define NEARFIELD_VERSION "0.0.0"
#endif

namespace nearfield {

json to_json(const HarmonicDiagonal& d) {
  json entries = json::array();
  for (int l = 0; l <= d.l_max(); ++l) entries.push_back({{"l", l}, {"re", d[l].real()}, {"im", d[l].imag()}});
  return {{"kind", to_string(d.kind)}, {"k", d.k}, {"a", d.a}, {"entries", entries}};
}

HarmonicDiagonal harmonic_diagonal_from_json(const json& j) {
  HarmonicDiagonal d;
  d.kind = dtn_kind_from_string(j.at("kind").get<std::string>());
  d.k = j.at("k").get<double>();
  d.a = j.at("a").get<double>();
  const auto& e = j.at("entries");
  d.entries.assign(e.size(), 0.0);
  for (const auto& item : e) {
    const int l = item.at("l").get<int>();
    if (l < 0 || l >= static_cast<int>(e.size())) throw ParseError("harmonic diagonal: degree out of range");
    d.entries[l] = {item.at("re").get<double>(), item.at("im").get<double>()};
  }
  return d;
}

json to_json(const DenseOperator& op) {
  std::vector<double> re;
  std::vector<double> im;
  re.reserve(op.matrix.size());
  im.reserve(op.matrix.size());
  for (Eigen::Index i = 0; i < op.rows(); ++i) {
    for (Eigen::Index j = 0; j < op.cols(); ++j) {
      re.push_back(op.matrix(i, j).real());
      im.push_back(op.matrix(i, j).imag());
    }
  }
  return {{"rows", op.rows()}, {"cols", op.cols()}, {"row_space", op.row_space},
          {"col_space", op.col_space}, {"re", re}, {"im", im}};
}

DenseOperator dense_operator_from_json(const json& j) {
  DenseOperator op;
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size()) {
    throw ParseError("dense operator: entry count does not match rows x cols");
  }
  op.row_space = j.value("row_space", "");
  op.col_space = j.value("col_space", "");
  op.matrix.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) op.matrix(i, c) = {re[i * cols + c], im[i * cols + c]};
  }
  return op;
}

json to_json(const NearFieldMatrix& f) {
  json j = to_json(f.op);
  j["provenance"] = f.provenance;
  j["metadata"] = f.metadata;
  return j;
}

NearFieldMatrix nearfield_from_json(const json& j) {
  NearFieldMatrix f;
  f.op = dense_operator_from_json(j);
  f.provenance = j.value("provenance", "");
  if (j.contains("metadata")) f.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  return f;
}

json to_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"margin", c.margin}, {"detail", c.detail}});
  }
  return {{"passed", report.passed()}, {"checks", checks}};
}

json to_json(const FitResult& fit) {
  json log = json::array();
  for (const auto& it : fit.log) {
    log.push_back({{"iteration", it.iteration}, {"misfit", it.misfit}, {"parameters", it.parameters}, {"step", it.step}});
  }
  return {{"breakpoints", fit.potential.breakpoints},
          {"values", fit.potential.values},
          {"parameters", fit.parameters},
          {"misfit", fit.misfit},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"log", log}};
}

std::string synthesis_path_csv(const std::vector<SynthesisResult>& path) {
  std::ostringstream os;
  os << "n,alpha_or_rank,residual_h32,nearfield_error\n";
  char buf[160];
  for (const auto& r : path) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.step, r.parameter, r.residual_h32, r.nearfield_error);
    os << buf;
  }
  return os.str();
}

json to_json(const CVector& v) {
  std::vector<double> re(v.size());
  std::vector<double> im(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  return {{"re", re}, {"im", im}};
}

CVector complex_vector_from_json(const json& j) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw ParseError("complex vector: re and im differ in length");
  CVector v(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) v[i] = {re[i], im[i]};
  return v;
}

std::string tool_version() { return NEARFIELD_VERSION; }

RunManifest make_manifest(const std::string& command, const std::string& scene_path, const std::string& output_dir,
                          const std::vector<std::string>& inputs) {
  std::string blob = command;
  for (const auto& in : inputs) {
    blob.push_back('\0');
    blob += in;
  }
  return {scene_path, command, output_dir, hex_digest(fnv1a64(blob)), tool_version()};
}

json to_json(const RunManifest& m) {
  return {{"scene", m.scene_path},
          {"command", m.command},
          {"output_dir", m.output_dir},
          {"hash", m.hash},
          {"tool_version", m.tool_version}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace nearfield
