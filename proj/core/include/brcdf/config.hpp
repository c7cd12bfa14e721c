#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brcdf {

enum class Variant { suboptimal, full };
enum class SigmaMode { none, random, optimal, per_agent };
enum class SMode { schedule, bcd };
enum class GammaReference { full_sharing, per_l };
enum class ReportMode { series, steady };

std::string to_string(Variant v);
std::string to_string(SigmaMode v);
std::string to_string(SMode v);
std::string to_string(GammaReference v);
std::string to_string(ReportMode v);

struct AttackConfig {
  bool enabled = false;
  std::vector<int> byzantine_counts = {5};
  int start = 30;  // k0
  std::vector<double> etas = {25.0};
  std::vector<SigmaMode> sigma_modes = {SigmaMode::random};
  std::vector<SMode> s_modes = {SMode::schedule};
};

/// Flat key-value experiment description. List-valued fields span the cell
/// grid: one cell per combination of (l, variant, sigma mode, s mode,
/// Byzantine count, eta).
struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  int agent_count = 25;  // L
  double edge_prob = 0.15;
  std::vector<int> shared_counts = {2, 4, 6, 8};  // l
  int shift = 1;                                  // tau
  std::string initial_pattern;                    // optional, e.g. "11000000"
  double gamma_multiplier = 0.9;
  GammaReference gamma_reference = GammaReference::full_sharing;
  int horizon = 150;
  int runs = 100;  // Monte-Carlo repetitions
  std::vector<Variant> variants = {Variant::suboptimal};
  AttackConfig attack;
  int bcd_sweeps = 10;  // T
  ReportMode report = ReportMode::series;
  double init_state_sigma = 1.0;
  double init_estimate_scatter = 0.0;
  std::string output_dir = "out";
  std::string label = "custom";

  /// Field-level validation against the given state dimension.
  void validate(int state_dim) const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys are
/// rejected with the offending name.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);

/// Experiment presets fig2..fig9 matching the reference figure sweeps.
ExperimentConfig preset(const std::string& name);

}  // namespace brcdf
