#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "brcdf/analysis.hpp"
#include "brcdf/attack.hpp"
#include "brcdf/filter.hpp"
#include "brcdf/model.hpp"
#include "brcdf/selection.hpp"
#include "brcdf/types.hpp"

namespace brcdf {

enum class GainVariant { suboptimal, full };

/// Noise streams for one Monte-Carlo run. Absent streams mean a noise-free
/// run (the gains still assume the nominal covariances).
struct RunStreams {
  std::optional<RngStream> process;
  std::optional<RngStream> observation;
  std::optional<RngStream> attack;
};

struct RunInputs {
  const StateSpaceModel* model = nullptr;
  const NetworkGraph* graph = nullptr;
  const SelectionTimeline* selections = nullptr;
  const GainSchedule* gains = nullptr;
  const AttackPlan* attack = nullptr;  // nullptr = attack-free
  int horizon = 0;
  Vector truth_start;                     // x(0)
  std::vector<Vector> initial_estimates;  // xhat_i(0)
  bool keep_estimates = false;
};

struct RunResult {
  std::vector<double> mse;             // (1/L) sum_i |e_i(k)|^2, k = 0..horizon
  std::vector<double> max_error_norm;  // max_i |e_i(k)|
  std::vector<Vector> truth;
  std::vector<std::vector<Vector>> estimates;  // [k][agent], only when requested
};

/// One synchronous network run: at every step all agents read the fragments
/// published in the previous phase, update in parallel semantics, then the
/// schedules advance. Byzantine agents perturb their published fragments
/// from attack_start onwards.
RunResult run_network_filter(const RunInputs& inputs, RunStreams streams);

/// Gain sequences for the variant that shares all necessary variables: per
/// step the gain keeps the neighbor cross-covariance terms, maintained by the
/// exact joint propagation (without the injected-noise term, which is not
/// visible to the agents). Freezes like the reduced-communication schedule.
GainSchedule compute_full_gain_schedule(const StateSpaceModel& model, const NetworkGraph& graph,
                                        const SelectionTimeline& selections, double gamma,
                                        int freeze_cap, double freeze_tol = 1e-9);

/// Convenience wrapper: one full-variant run plus the exact joint covariance
/// series under the same schedules and gains.
struct FullRun {
  RunResult run;
  JointSeries joint;
};
FullRun full_filter_run(const RunInputs& inputs, RunStreams streams, const Matrix& sigma,
                        int attack_start, const Matrix& initial_joint);

}  // namespace brcdf
