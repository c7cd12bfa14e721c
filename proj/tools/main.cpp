// Command line front end: scenario simulation, figure presets, offline
// attack design, stability bound queries, and graph export.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brcdf/attack.hpp"
#include "brcdf/config.hpp"
#include "brcdf/errors.hpp"
#include "brcdf/experiment.hpp"
#include "brcdf/filter.hpp"
#include "brcdf/io.hpp"
#include "brcdf/model.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

void warn_coverage(const brcdf::ExperimentConfig& cfg, int state_dim) {
  if (std::gcd(cfg.shift, state_dim) != 1)
    std::cerr << "warning: tau = " << cfg.shift << " shares a factor with m = " << state_dim
              << "; per-coordinate coverage is no longer uniform over a cycle\n";
}

int run_simulate(const std::string& config_path) {
  brcdf::ExperimentConfig cfg = brcdf::load_config(config_path);
  warn_coverage(cfg, 8);
  const brcdf::ScenarioResult result = brcdf::run_scenario(cfg);
  brcdf::write_artifacts(result, cfg);
  std::cout << "wrote " << cfg.output_dir << "/" << cfg.label << ".csv (" << result.cells.size()
            << " cells)\n";
  return 0;
}

int run_reproduce(const std::string& name, std::string out_dir, std::uint64_t seed) {
  brcdf::ExperimentConfig cfg = brcdf::preset(name);
  cfg.master_seed = seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  else cfg.output_dir = "out_" + name;
  const brcdf::ScenarioResult result = brcdf::run_scenario(cfg);
  brcdf::write_artifacts(result, cfg);
  std::cout << "wrote " << cfg.output_dir << "/" << cfg.label << ".csv (" << result.cells.size()
            << " cells)\n";
  return 0;
}

int run_design(const std::string& state_path, const std::string& mode,
               const std::string& out_dir) {
  const brcdf::ExperimentState state = brcdf::state_from_text(brcdf::read_text_file(state_path));
  if (state.byzantine.empty())
    throw brcdf::ConfigError("design-attack: the state carries no Byzantine set");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<brcdf::SelectionSchedule> schedules = state.schedules;
  const int budget = schedules[state.byzantine.front()].shared_count();
  brcdf::AttackObjectiveContext context(state.graph, state.consensus, state.byzantine);

  if (mode == "select" || mode == "both") {
    brcdf::RngStream stream(0x5eedULL);
    const brcdf::Matrix design_sigma = brcdf::random_covariance(
        state.byzantine, state.eta, state.model.state_dim(), state.model.agent_count(), stream);
    std::vector<brcdf::SelectionSchedule> members;
    for (int agent : state.byzantine) members.push_back(schedules[agent]);
    const brcdf::BcdResult bcd =
        brcdf::bcd_design(context, design_sigma, budget, 10, members);
    std::string text;
    for (std::size_t idx = 0; idx < state.byzantine.size(); ++idx) {
      schedules[state.byzantine[idx]] = bcd.designed[idx];
      text += std::to_string(state.byzantine[idx]) + " " +
              bcd.designed[idx].pattern_string() + "\n";
    }
    brcdf::write_text_file((fs::path(out_dir) / "patterns.txt").string(), text);
    std::cout << "wrote " << out_dir << "/patterns.txt (objective "
              << brcdf::format_sig(bcd.objective_trace.back()) << ")\n";
  }
  if (mode == "cov" || mode == "both") {
    const brcdf::Matrix gamma =
        brcdf::masked_gamma(state.consensus, state.graph, schedules, state.byzantine);
    const brcdf::CovarianceDesign design = brcdf::design_covariance(
        gamma, state.eta, state.byzantine, state.model.state_dim());
    brcdf::write_text_file((fs::path(out_dir) / "sigma_optimal.txt").string(),
                           brcdf::matrix_to_text(design.sigma));
    std::cout << "wrote " << out_dir << "/sigma_optimal.txt (objective "
              << brcdf::format_sig(design.objective) << ")\n";
  }
  return 0;
}

int run_gamma_bound(const std::string& config_path) {
  brcdf::ExperimentConfig cfg = brcdf::load_config(config_path);
  const brcdf::ReferenceSetup setup =
      brcdf::reference_setup(cfg.master_seed, cfg.agent_count, cfg.edge_prob);
  cfg.validate(setup.model.state_dim());
  warn_coverage(cfg, setup.model.state_dim());
  std::vector<brcdf::Matrix> steady(setup.model.agent_count());
  for (int i = 0; i < setup.model.agent_count(); ++i)
    steady[i] = brcdf::steady_state_covariance(setup.model.A, setup.model.Q,
                                               setup.model.agents[i]);
  for (int l : cfg.shared_counts) {
    const double p_e = static_cast<double>(l) / setup.model.state_dim();
    const brcdf::StabilityProfile profile =
        brcdf::gamma_bound(setup.graph, steady, setup.model, p_e);
    std::cout << "l = " << l << "  p_e = " << brcdf::format_sig(p_e)
              << "  gamma_star = " << brcdf::format_sig(profile.gamma_star)
              << "  lambda_min(Lambda_I) = " << brcdf::format_sig(profile.lambda_min_one)
              << "  lambda_max((L(x)I) Lambda_II (L(x)I)) = "
              << brcdf::format_sig(profile.lambda_max_coupled_two) << "\n";
  }
  return 0;
}

int run_export_graph(const std::string& dot_path, const std::string& config_path) {
  brcdf::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = brcdf::load_config(config_path);
  const brcdf::ReferenceSetup setup =
      brcdf::reference_setup(cfg.master_seed, cfg.agent_count, cfg.edge_prob);
  brcdf::write_text_file(dot_path, setup.graph.to_dot());
  std::cout << "wrote " << dot_path << " (" << setup.graph.size() << " nodes, "
            << setup.graph.edge_count() << " edges)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-resilient consensus Kalman filter simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario from a config file");
  simulate->add_option("--config", config_path, "Path to the flat key=value config")->required();

  std::string preset_name, out_dir;
  std::uint64_t seed = 1;
  auto* reproduce = app.add_subcommand("reproduce", "Run a figure preset (fig2..fig9)");
  reproduce->add_option("figure", preset_name, "Preset name")->required();
  reproduce->add_option("--out", out_dir, "Output directory");
  reproduce->add_option("--seed", seed, "Master seed");

  std::string state_path, mode = "cov", design_out = "out_design";
  auto* design = app.add_subcommand("design-attack", "Design an attack from a saved state");
  design->add_option("--state", state_path, "Serialized experiment state")->required();
  design->add_option("--mode", mode, "cov, select, or both")
      ->check(CLI::IsMember({"cov", "select", "both"}));
  design->add_option("--out", design_out, "Output directory");

  std::string bound_config;
  auto* bound = app.add_subcommand("gamma-bound", "Print the consensus gain bound");
  bound->add_option("--config", bound_config, "Path to the config")->required();

  std::string dot_path, graph_config;
  auto* export_graph = app.add_subcommand("export-graph", "Write the network as DOT");
  export_graph->add_option("--dot", dot_path, "Output DOT path")->required();
  export_graph->add_option("--config", graph_config, "Optional config for seed/L/edge_prob");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(config_path);
    if (reproduce->parsed()) return run_reproduce(preset_name, out_dir, seed);
    if (design->parsed()) return run_design(state_path, mode, design_out);
    if (bound->parsed()) return run_gamma_bound(bound_config);
    if (export_graph->parsed()) return run_export_graph(dot_path, graph_config);
  } catch (const brcdf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const brcdf::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
