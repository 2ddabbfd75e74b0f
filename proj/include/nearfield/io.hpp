#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nearfield/dtn.hpp"
#include "nearfield/emission.hpp"
#include "nearfield/forward.hpp"
#include "nearfield/inversion.hpp"
#include "nearfield/layer_potentials.hpp"
#include "nearfield/scene.hpp"

namespace nearfield {

using json = nlohmann::json;

json to_json(const HarmonicDiagonal& d);
HarmonicDiagonal harmonic_diagonal_from_json(const json& j);

/// {rows, cols, row_space, col_space, re: [...], im: [...]} in row-major order.
json to_json(const DenseOperator& op);
DenseOperator dense_operator_from_json(const json& j);

/// Dense operator fields plus provenance and metadata.
json to_json(const NearFieldMatrix& f);
NearFieldMatrix nearfield_from_json(const json& j);

json to_json(const ValidationReport& report);
json to_json(const FitResult& fit);

/// CSV rows: n, alpha_or_rank, residual_h32, nearfield_error.
std::string synthesis_path_csv(const std::vector<SynthesisResult>& path);

/// {"re": [...], "im": [...]}.
json to_json(const CVector& v);
CVector complex_vector_from_json(const json& j);

/// Identifies one CLI run; every output file carries `hash`.
struct RunManifest {
  std::string scene_path;
  std::string command;
  std::string output_dir;
  std::string hash;  // FNV-1a over the command, canonical scene text, options and input files
  std::string tool_version;
};

/// `inputs` are the option strings and file contents that influence the run.
RunManifest make_manifest(const std::string& command, const std::string& scene_path, const std::string& output_dir,
                          const std::vector<std::string>& inputs);
json to_json(const RunManifest& m);
std::string tool_version();

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace nearfield
