#include "brcdf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>

#include "brcdf/errors.hpp"
#include "brcdf/filter.hpp"

namespace brcdf {
namespace {

constexpr int kSteadyWindow = 30;

std::vector<SelectionSchedule> initial_schedules(const ExperimentConfig& cfg, int state_dim,
                                                 int l) {
  std::vector<SelectionSchedule> schedules;
  schedules.reserve(cfg.agent_count);
  for (int agent = 0; agent < cfg.agent_count; ++agent) {
    if (!cfg.initial_pattern.empty()) {
      SelectionSchedule sched = SelectionSchedule::from_pattern(cfg.initial_pattern, cfg.shift);
      if (sched.shared_count() != l)
        throw ConfigError("selection: pattern popcount must equal l");
      schedules.push_back(std::move(sched));
    } else {
      RngStream stream = RngStream::keyed(cfg.master_seed, agent, "selection");
      schedules.push_back(SelectionSchedule::random(state_dim, l, cfg.shift, stream));
    }
  }
  return schedules;
}

std::vector<SelectionSchedule> schedules_at(const std::vector<SelectionSchedule>& initial,
                                            int step) {
  std::vector<SelectionSchedule> out = initial;
  for (int k = 0; k < step; ++k)
    for (auto& sched : out) sched.advance();
  return out;
}

struct CellPlan {
  AttackPlan plan;
  bool attacked = false;
  bool designed_patterns = false;
  std::vector<SelectionSchedule> designed;  // aligned with plan.byzantine
  std::string sigma_hash;
  std::string pattern_text;
};

CellPlan build_attack(const ExperimentConfig& cfg, const ReferenceSetup& setup,
                      const GainSchedule& gains, const std::vector<SelectionSchedule>& initial,
                      const CellKey& key) {
  CellPlan out;
  if (!cfg.attack.enabled || key.sigma_mode == SigmaMode::none) return out;
  const int m = setup.model.state_dim();
  const int count = setup.model.agent_count();

  AttackPlan& plan = out.plan;
  plan.byzantine = byzantine_set(setup.graph, key.byzantine_count);
  plan.stealth_budget = key.eta;
  plan.attack_start = cfg.attack.start;
  plan.state_dim = m;
  plan.agent_count = count;

  std::vector<Matrix> frozen(count);
  for (int i = 0; i < count; ++i) frozen[i] = gains.consensus(i, gains.freeze_step());
  std::vector<SelectionSchedule> at_start = schedules_at(initial, plan.attack_start);

  if (key.s_mode == SMode::bcd) {
    AttackObjectiveContext context(setup.graph, frozen, plan.byzantine);
    Matrix design_sigma;
    if (key.sigma_mode == SigmaMode::random) {
      RngStream stream = RngStream::keyed(cfg.master_seed, 0, "sigma-random");
      design_sigma = random_covariance(plan.byzantine, key.eta, m, count, stream);
    } else if (key.sigma_mode == SigmaMode::per_agent) {
      const int max_members = *std::max_element(cfg.attack.byzantine_counts.begin(),
                                                cfg.attack.byzantine_counts.end());
      design_sigma = per_agent_covariance(plan.byzantine, key.eta, m, count, max_members);
    } else {
      // Covariance design needs the patterns first; seed the pattern design
      // with a provisional random covariance of the same budget.
      RngStream stream = RngStream::keyed(cfg.master_seed, 0, "sigma-design");
      design_sigma = random_covariance(plan.byzantine, key.eta, m, count, stream);
    }
    std::vector<SelectionSchedule> members;
    for (int agent : plan.byzantine) members.push_back(at_start[agent]);
    BcdResult bcd = bcd_design(context, design_sigma, key.l, cfg.bcd_sweeps, members);
    out.designed_patterns = true;
    out.designed = bcd.designed;
    std::ostringstream patterns;
    for (std::size_t idx = 0; idx < plan.byzantine.size(); ++idx) {
      at_start[plan.byzantine[idx]] = bcd.designed[idx];
      patterns << plan.byzantine[idx] << " " << bcd.designed[idx].pattern_string() << "\n";
    }
    out.pattern_text = patterns.str();
  }

  switch (key.sigma_mode) {
    case SigmaMode::none:
      break;
    case SigmaMode::random: {
      RngStream stream = RngStream::keyed(cfg.master_seed, 0, "sigma-random");
      plan.sigma = random_covariance(plan.byzantine, key.eta, m, count, stream);
      break;
    }
    case SigmaMode::optimal: {
      const Matrix gamma_k0 = masked_gamma(frozen, setup.graph, at_start, plan.byzantine);
      plan.sigma = design_covariance(gamma_k0, key.eta, plan.byzantine, m).sigma;
      break;
    }
    case SigmaMode::per_agent: {
      const int max_members = *std::max_element(cfg.attack.byzantine_counts.begin(),
                                                cfg.attack.byzantine_counts.end());
      plan.sigma = per_agent_covariance(plan.byzantine, key.eta, m, count, max_members);
      break;
    }
  }
  plan.validate();
  out.attacked = true;
  out.sigma_hash = content_hash(matrix_to_text(plan.sigma));
  return out;
}

}  // namespace

std::vector<double> empirical_mse(const CellContext& ctx, int runs) {
  if (runs < 1) throw ConfigError("empirical_mse: at least one run required");
  const int m = ctx.model->state_dim();
  const int count = ctx.model->agent_count();
  std::vector<double> total(ctx.horizon + 1, 0.0);
  for (int run = 0; run < runs; ++run) {
    RunInputs inputs;
    inputs.model = ctx.model;
    inputs.graph = ctx.graph;
    inputs.selections = &ctx.timeline;
    inputs.gains = &ctx.gains;
    inputs.attack = ctx.attacked ? &ctx.plan : nullptr;
    inputs.horizon = ctx.horizon;

    RngStream init_stream = RngStream::keyed(ctx.master_seed, run, "truth-init");
    inputs.truth_start = ctx.state_sigma > 0.0
                             ? Vector(ctx.state_sigma * init_stream.gaussian_vector(m))
                             : Vector(Vector::Zero(m));
    inputs.initial_estimates.assign(count, Vector::Zero(m));
    if (ctx.estimate_scatter > 0.0) {
      RngStream scatter_stream = RngStream::keyed(ctx.master_seed, run, "estimate-init");
      for (int i = 0; i < count; ++i)
        inputs.initial_estimates[i] = ctx.estimate_scatter * scatter_stream.gaussian_vector(m);
    }

    RunStreams streams;
    if (!ctx.noise_free) {
      streams.process = RngStream::keyed(ctx.master_seed, run, "truth-noise");
      streams.observation = RngStream::keyed(ctx.master_seed, run, "observation-noise");
      if (ctx.attacked) streams.attack = RngStream::keyed(ctx.master_seed, run, "attack-noise");
    }

    const RunResult result = run_network_filter(inputs, std::move(streams));
    for (int k = 0; k <= ctx.horizon; ++k) total[k] += result.mse[k];
  }
  for (double& v : total) v /= runs;
  return total;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
  const ReferenceSetup setup = reference_setup(cfg.master_seed, cfg.agent_count, cfg.edge_prob);
  const int m = setup.model.state_dim();
  cfg.validate(m);

  std::vector<Matrix> steady(setup.model.agent_count());
  for (int i = 0; i < setup.model.agent_count(); ++i)
    steady[i] = steady_state_covariance(setup.model.A, setup.model.Q, setup.model.agents[i]);

  std::map<int, StabilityProfile> profiles;  // keyed by l; key 0 = full sharing
  profiles.emplace(0, gamma_bound(setup.graph, steady, setup.model, 1.0));
  if (cfg.gamma_reference == GammaReference::per_l)
    for (int l : cfg.shared_counts)
      profiles.emplace(l, gamma_bound(setup.graph, steady, setup.model,
                                      static_cast<double>(l) / m));

  ScenarioResult result;
  result.manifest.emplace_back("label", cfg.label);
  result.manifest.emplace_back("master_seed", std::to_string(cfg.master_seed));
  result.manifest.emplace_back("gamma_multiplier", format_sig(cfg.gamma_multiplier));
  result.manifest.emplace_back("gamma_reference", to_string(cfg.gamma_reference));
  result.manifest.emplace_back("gamma_star_full_sharing", format_sig(profiles.at(0).gamma_star));
  if (std::gcd(cfg.shift, m) != 1)
    result.manifest.emplace_back("warning",
                                 "tau shares a factor with the state dimension; "
                                 "coverage uniformity is not guaranteed");

  const double init_scale = std::sqrt(cfg.init_state_sigma * cfg.init_state_sigma +
                                      cfg.init_estimate_scatter * cfg.init_estimate_scatter);
  int cell_index = 0;
  for (int l : cfg.shared_counts) {
    const double p_e = static_cast<double>(l) / m;
    const StabilityProfile& profile =
        cfg.gamma_reference == GammaReference::per_l ? profiles.at(l) : profiles.at(0);
    const double gamma = cfg.gamma_multiplier * profile.gamma_star;
    const std::vector<SelectionSchedule> schedules0 = initial_schedules(cfg, m, l);

    const std::vector<SigmaMode> sigma_modes =
        cfg.attack.enabled ? cfg.attack.sigma_modes : std::vector<SigmaMode>{SigmaMode::none};
    const std::vector<SMode> s_modes =
        cfg.attack.enabled ? cfg.attack.s_modes : std::vector<SMode>{SMode::schedule};
    const std::vector<int> counts =
        cfg.attack.enabled ? cfg.attack.byzantine_counts : std::vector<int>{0};
    const std::vector<double> etas =
        cfg.attack.enabled ? cfg.attack.etas : std::vector<double>{0.0};

    for (Variant variant : cfg.variants) {
      for (SigmaMode sigma_mode : sigma_modes) {
        for (SMode s_mode : s_modes) {
          for (std::size_t count_idx = 0; count_idx < counts.size(); ++count_idx) {
            for (std::size_t eta_idx = 0; eta_idx < etas.size(); ++eta_idx) {
              CellKey key;
              key.l = l;
              key.variant = variant;
              key.sigma_mode = cfg.attack.enabled ? sigma_mode : SigmaMode::none;
              key.s_mode = s_mode;
              key.byzantine_count = counts[count_idx];
              key.eta = etas[eta_idx];
              key.sweep_ordinal = counts.size() > 1 ? counts[count_idx]
                                                    : (etas.size() > 1 ? static_cast<int>(eta_idx)
                                                                       : cell_index);

              const int freeze_cap = cfg.attack.enabled ? cfg.attack.start - 1 : cfg.horizon;
              GainSchedule gains = GainSchedule::compute(setup.model, gamma, freeze_cap);

              CellPlan attack = build_attack(cfg, setup, gains, schedules0, key);
              SelectionTimeline timeline;
              if (attack.designed_patterns) {
                ScheduleSwap swap;
                swap.agents = attack.plan.byzantine;
                swap.replacements = attack.designed;
                timeline = roll_schedules(schedules0, cfg.horizon, cfg.attack.start, &swap);
              } else {
                timeline = roll_schedules(schedules0, cfg.horizon);
              }

              CellContext ctx;
              ctx.model = &setup.model;
              ctx.graph = &setup.graph;
              ctx.timeline = std::move(timeline);
              ctx.attacked = attack.attacked;
              ctx.plan = attack.plan;
              ctx.horizon = cfg.horizon;
              ctx.state_sigma = cfg.init_state_sigma;
              ctx.estimate_scatter = cfg.init_estimate_scatter;
              ctx.master_seed = cfg.master_seed;

              const Matrix sigma = attack.attacked
                                       ? attack.plan.sigma
                                       : Matrix::Zero(cfg.agent_count * m, cfg.agent_count * m);
              const int attack_start = attack.attacked ? cfg.attack.start : cfg.horizon + 1;

              CellResult cell;
              cell.key = key;
              cell.gamma = gamma;
              cell.gamma_star = profile.gamma_star;

              if (variant == Variant::suboptimal) {
                ctx.gains = std::move(gains);
                cell.series.mse_analytic =
                    expected_mse_series(setup.model, setup.graph, ctx.gains, sigma, p_e,
                                        attack_start, cfg.horizon, init_scale);
                cell.series.mse_prime =
                    realized_mse_series(setup.model, setup.graph, ctx.gains, ctx.timeline, sigma,
                                        attack_start, cfg.horizon, init_scale);
              } else {
                ctx.gains = compute_full_gain_schedule(setup.model, setup.graph, ctx.timeline,
                                                       gamma, freeze_cap);
                const Matrix initial_joint = initial_joint_covariance(
                    cfg.agent_count, m, cfg.init_state_sigma, cfg.init_estimate_scatter);
                const JointSeries joint =
                    joint_error_series(setup.model, setup.graph, ctx.gains, ctx.timeline, sigma,
                                       attack_start, cfg.horizon, initial_joint);
                cell.series.mse_analytic = joint.mse;
                cell.series.mse_prime = joint.mse;
              }
              cell.freeze_step = ctx.gains.freeze_step();
              cell.series.mse_empirical = empirical_mse(ctx, cfg.runs);
              cell.series.steady_empirical = tail_average(cell.series.mse_empirical, kSteadyWindow);
              cell.series.steady_prime = tail_average(cell.series.mse_prime, kSteadyWindow);
              cell.series.steady_analytic = tail_average(cell.series.mse_analytic, kSteadyWindow);
              cell.series.validate();

              const std::string prefix = "cell." + std::to_string(cell_index);
              result.manifest.emplace_back(prefix + ".key",
                                           "l=" + std::to_string(l) + " " + to_string(variant) +
                                               " " + to_string(key.sigma_mode) + " " +
                                               to_string(key.s_mode) + " B=" +
                                               std::to_string(key.byzantine_count) + " eta=" +
                                               format_sig(key.eta));
              result.manifest.emplace_back(prefix + ".gamma", format_sig(gamma));
              result.manifest.emplace_back(prefix + ".gamma_star", format_sig(profile.gamma_star));
              result.manifest.emplace_back(prefix + ".gamma_le_gamma_star",
                                           gamma <= profile.gamma_star ? "true" : "false");
              result.manifest.emplace_back(prefix + ".freeze_step",
                                           std::to_string(cell.freeze_step));
              if (attack.attacked) {
                std::string members;
                for (int agent : attack.plan.byzantine)
                  members += (members.empty() ? "" : " ") + std::to_string(agent);
                result.manifest.emplace_back(prefix + ".byzantine", members);
                result.manifest.emplace_back(prefix + ".sigma_hash", attack.sigma_hash);
                if (attack.designed_patterns)
                  result.manifest.emplace_back(
                      prefix + ".patterns_hash", content_hash(attack.pattern_text));
              }

              if (attack.attacked && result.state_text.empty()) {
                ExperimentState state;
                state.model = setup.model;
                state.graph = setup.graph;
                const int count = setup.model.agent_count();
                for (int i = 0; i < count; ++i) {
                  state.kalman.push_back(ctx.gains.kalman(i, ctx.gains.freeze_step()));
                  state.consensus.push_back(ctx.gains.consensus(i, ctx.gains.freeze_step()));
                }
                state.schedules = schedules_at(schedules0, cfg.attack.start);
                state.byzantine = attack.plan.byzantine;
                state.eta = key.eta;
                state.attack_start = cfg.attack.start;
                state.gamma = gamma;
                result.state_text = state_to_text(state);
              }

              result.cells.push_back(std::move(cell));
              ++cell_index;
            }
          }
        }
      }
    }
  }

  result.csv_text = export_csv(result.cells, cfg.report);
  result.manifest.emplace_back("csv_hash", content_hash(result.csv_text));
  if (!result.state_text.empty())
    result.manifest.emplace_back("state_hash", content_hash(result.state_text));
  return result;
}

std::string export_csv(const std::vector<CellResult>& cells, ReportMode mode) {
  if (cells.empty()) throw ConfigError("export_csv: empty series bundle");
  std::ostringstream out;
  out << "k,l,variant,sigma_mode,s_mode,mse_empirical,mse_prime,mse_analytic\n";
  for (const auto& cell : cells) {
    const std::string tag = std::to_string(cell.key.l) + "," + to_string(cell.key.variant) + "," +
                            to_string(cell.key.sigma_mode) + "," + to_string(cell.key.s_mode);
    if (mode == ReportMode::series) {
      const std::size_t steps = cell.series.mse_empirical.size();
      for (std::size_t k = 0; k < steps; ++k)
        out << k << "," << tag << "," << format_sig(cell.series.mse_empirical[k]) << ","
            << format_sig(cell.series.mse_prime[k]) << ","
            << format_sig(cell.series.mse_analytic[k]) << "\n";
    } else {
      out << cell.key.sweep_ordinal << "," << tag << ","
          << format_sig(cell.series.steady_empirical) << ","
          << format_sig(cell.series.steady_prime) << ","
          << format_sig(cell.series.steady_analytic) << "\n";
    }
  }
  return out.str();
}

void write_artifacts(const ScenarioResult& result, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_text_file((dir / (cfg.label + ".csv")).string(), result.csv_text);
  write_text_file((dir / (cfg.label + "_manifest.txt")).string(),
                  manifest_to_text(result.manifest) + "config:\n" + config_to_text(cfg));
  write_text_file((dir / (cfg.label + "_plot.py")).string(),
                  plot_script_template(cfg.label + ".csv", cfg.label));
  if (!result.state_text.empty())
    write_text_file((dir / (cfg.label + "_state_k0.txt")).string(), result.state_text);
}

}  // namespace brcdf
