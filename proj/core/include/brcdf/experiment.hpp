#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "brcdf/analysis.hpp"
#include "brcdf/attack.hpp"
#include "brcdf/config.hpp"
#include "brcdf/io.hpp"
#include "brcdf/model.hpp"
#include "brcdf/run.hpp"

namespace brcdf {

struct CellKey {
  int l = 0;
  Variant variant = Variant::suboptimal;
  SigmaMode sigma_mode = SigmaMode::none;
  SMode s_mode = SMode::schedule;
  int byzantine_count = 0;
  double eta = 0.0;
  int sweep_ordinal = 0;  // k column of steady-report rows
};

struct CellResult {
  CellKey key;
  MetricsSeries series;
  double gamma = 0.0;
  double gamma_star = 0.0;
  int freeze_step = 0;
};

/// Everything one Monte-Carlo cell needs; also the unit the acceptance suite
/// drives directly.
struct CellContext {
  const StateSpaceModel* model = nullptr;
  const NetworkGraph* graph = nullptr;
  SelectionTimeline timeline;
  GainSchedule gains;
  AttackPlan plan;
  bool attacked = false;
  int horizon = 0;
  double state_sigma = 1.0;
  double estimate_scatter = 0.0;
  bool noise_free = false;  // suppress every noise draw; gains stay nominal
  std::uint64_t master_seed = 1;
};

/// Average of (1/L) sum_i |e_i(k)|^2 over `runs` independent runs with
/// disjoint keyed streams. Deterministic for a fixed master seed.
std::vector<double> empirical_mse(const CellContext& ctx, int runs);

struct ScenarioResult {
  std::vector<CellResult> cells;
  std::vector<std::pair<std::string, std::string>> manifest;
  std::string csv_text;
  std::string state_text;  // experiment state at k0, when an attack ran
};

/// Builds the model and graph from the master seed, resolves gamma from the
/// stability bound, sweeps the cell grid, and assembles CSV plus manifest.
/// Pure: no files are touched.
ScenarioResult run_scenario(const ExperimentConfig& cfg);

/// CSV with header k,l,variant,sigma_mode,s_mode,mse_empirical,mse_prime,
/// mse_analytic; one row per step (series) or per cell (steady), 12
/// significant digits. Rejects an empty bundle.
std::string export_csv(const std::vector<CellResult>& cells, ReportMode mode);

/// Writes <label>.csv, <label>_manifest.txt, <label>_plot.py and, when
/// present, <label>_state_k0.txt into cfg.output_dir (created if needed).
void write_artifacts(const ScenarioResult& result, const ExperimentConfig& cfg);

}  // namespace brcdf
