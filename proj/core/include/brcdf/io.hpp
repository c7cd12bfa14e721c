#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "brcdf/model.hpp"
#include "brcdf/selection.hpp"
#include "brcdf/types.hpp"

namespace brcdf {

/// %.12g formatting used for every CSV value.
std::string format_sig(double value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// FNV-1a over the content bytes, as a 16-digit hex string.
std::string content_hash(const std::string& content);

/// Portable matrix artifact: "rows cols" header, then one row per line with
/// %.17g values (doubles round-trip exactly).
std::string matrix_to_text(const Matrix& m);
Matrix matrix_from_text(const std::string& text);

/// Serialized experiment state at the attack start: model, graph, frozen
/// gains and schedules, enough to design an attack offline.
struct ExperimentState {
  StateSpaceModel model;
  NetworkGraph graph;
  std::vector<Matrix> kalman;
  std::vector<Matrix> consensus;
  std::vector<SelectionSchedule> schedules;  // patterns at k0
  std::vector<int> byzantine;
  double eta = 0.0;
  int attack_start = 0;
  double gamma = 0.0;
};

std::string state_to_text(const ExperimentState& state);
ExperimentState state_from_text(const std::string& text);

/// Deterministic key = value manifest.
std::string manifest_to_text(const std::vector<std::pair<std::string, std::string>>& entries);

/// Matplotlib script template that reads the CSV next to it.
std::string plot_script_template(const std::string& csv_name, const std::string& label);

}  // namespace brcdf
