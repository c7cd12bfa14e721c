#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "brcdf/config.hpp"
#include "brcdf/errors.hpp"
#include "brcdf/experiment.hpp"
#include "brcdf/io.hpp"

using namespace brcdf;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.master_seed = 5;
  cfg.agent_count = 8;
  cfg.edge_prob = 0.5;
  cfg.shared_counts = {4};
  cfg.horizon = 60;
  cfg.runs = 10;
  cfg.attack.enabled = true;
  cfg.attack.start = 30;
  cfg.attack.byzantine_counts = {2};
  cfg.attack.etas = {8.0};
  cfg.attack.sigma_modes = {SigmaMode::random};
  cfg.attack.s_modes = {SMode::schedule};
  cfg.label = "small";
  return cfg;
}

}  // namespace

TEST_CASE("config text round trip") {
  ExperimentConfig cfg = small_config();
  cfg.variants = {Variant::suboptimal, Variant::full};
  cfg.attack.sigma_modes = {SigmaMode::random, SigmaMode::optimal};
  const ExperimentConfig parsed = parse_config(config_to_text(cfg));
  CHECK(parsed.master_seed == cfg.master_seed);
  CHECK(parsed.agent_count == cfg.agent_count);
  CHECK(parsed.shared_counts == cfg.shared_counts);
  CHECK(parsed.variants == cfg.variants);
  CHECK(parsed.attack.sigma_modes == cfg.attack.sigma_modes);
  CHECK(parsed.attack.start == cfg.attack.start);
  CHECK(parsed.attack.etas == cfg.attack.etas);
  CHECK(parsed.gamma_multiplier == cfg.gamma_multiplier);
}

TEST_CASE("config parsing accepts comments and rejects unknown keys") {
  const ExperimentConfig cfg = parse_config(
      "# experiment\n"
      "master_seed = 9\n"
      "l = 2, 4\n"
      "selection = \"11000000\"  # pattern\n"
      "\n"
      "attack.enabled = true\n");
  CHECK(cfg.master_seed == 9);
  CHECK(cfg.shared_counts == std::vector<int>{2, 4});
  CHECK(cfg.initial_pattern == "11000000");
  CHECK(cfg.attack.enabled);

  CHECK_THROWS_WITH_AS(parse_config("bogus = 1\n"), "config: unknown key 'bogus'", ConfigError);
  CHECK_THROWS_AS(parse_config("horizon = ten\n"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  ExperimentConfig cfg = small_config();
  cfg.shared_counts = {9};
  try {
    cfg.validate(8);
    FAIL("expected a validation error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("l:") == 0);
  }

  cfg = small_config();
  cfg.gamma_multiplier = 1.5;
  CHECK_THROWS_AS(cfg.validate(8), ConfigError);

  cfg = small_config();
  cfg.attack.s_modes = {SMode::bcd};
  cfg.attack.sigma_modes = {SigmaMode::none};
  CHECK_THROWS_AS(cfg.validate(8), ConfigError);
}

TEST_CASE("presets pin the reference sweeps") {
  const ExperimentConfig fig2 = preset("fig2");
  CHECK_FALSE(fig2.attack.enabled);
  CHECK(fig2.shared_counts == std::vector<int>{2, 4, 6, 8});

  const ExperimentConfig fig3 = preset("fig3");
  CHECK(fig3.attack.enabled);
  CHECK(fig3.attack.start == 30);
  CHECK(fig3.attack.byzantine_counts == std::vector<int>{5});
  CHECK(fig3.attack.etas == std::vector<double>{25.0});
  CHECK(fig3.variants == std::vector<Variant>{Variant::suboptimal, Variant::full});

  const ExperimentConfig fig5 = preset("fig5");
  CHECK(fig5.bcd_sweeps == 10);
  CHECK(fig5.attack.s_modes == std::vector<SMode>{SMode::schedule, SMode::bcd});

  const ExperimentConfig fig8 = preset("fig8");
  CHECK(fig8.report == ReportMode::steady);
  CHECK(fig8.attack.byzantine_counts.size() == 10);

  CHECK_THROWS_AS(preset("fig99"), ConfigError);
}

TEST_CASE("scenario output is deterministic byte for byte") {
  const ExperimentConfig cfg = small_config();
  const ScenarioResult a = run_scenario(cfg);
  const ScenarioResult b = run_scenario(cfg);
  CHECK(a.csv_text == b.csv_text);
  CHECK(a.state_text == b.state_text);
  CHECK(manifest_to_text(a.manifest) == manifest_to_text(b.manifest));
}

TEST_CASE("attack-free full-sharing series decays monotonically to its floor") {
  ExperimentConfig cfg = small_config();
  cfg.attack.enabled = false;
  cfg.shared_counts = {8};
  cfg.horizon = 80;
  const ScenarioResult result = run_scenario(cfg);
  REQUIRE(result.cells.size() == 1);
  const auto& analytic = result.cells[0].series.mse_analytic;
  for (std::size_t k = 0; k + 1 < analytic.size(); ++k)
    CHECK(analytic[k + 1] <= analytic[k] + 1e-12);
  CHECK(analytic.back() < analytic.front());
}

TEST_CASE("validation errors surface through run_scenario") {
  ExperimentConfig cfg = small_config();
  cfg.shared_counts = {9};
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("csv export format") {
  CHECK_THROWS_AS(export_csv({}, ReportMode::series), ConfigError);

  const ExperimentConfig cfg = small_config();
  const ScenarioResult result = run_scenario(cfg);
  std::istringstream in(result.csv_text);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,l,variant,sigma_mode,s_mode,mse_empirical,mse_prime,mse_analytic");

  // Values round-trip through their printed 12-significant-digit form.
  std::string line;
  std::getline(in, line);
  std::stringstream fields(line);
  std::string field;
  for (int i = 0; i < 6; ++i) std::getline(fields, field, ',');
  const double value = std::stod(field);
  CHECK(format_sig(std::stod(format_sig(value))) == format_sig(value));

  // One row per step per cell plus the header.
  int rows = 0;
  std::istringstream counter(result.csv_text);
  while (std::getline(counter, line)) ++rows;
  CHECK(rows == 1 + static_cast<int>(result.cells.size()) * (cfg.horizon + 1));
}

TEST_CASE("steady reports write one row per sweep point") {
  ExperimentConfig cfg = small_config();
  cfg.report = ReportMode::steady;
  cfg.attack.byzantine_counts = {1, 2, 3};
  cfg.runs = 4;
  const ScenarioResult result = run_scenario(cfg);
  std::istringstream in(result.csv_text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<int> ks;
  while (std::getline(in, line)) ks.push_back(std::stoi(line.substr(0, line.find(','))));
  CHECK(ks == std::vector<int>{1, 2, 3});
}

TEST_CASE("scenario manifests record the stability bound and gains") {
  const ExperimentConfig cfg = small_config();
  const ScenarioResult result = run_scenario(cfg);
  const std::string text = manifest_to_text(result.manifest);
  CHECK(text.find("gamma_star_full_sharing") != std::string::npos);
  CHECK(text.find("cell.0.gamma ") != std::string::npos);
  CHECK(text.find("cell.0.gamma_le_gamma_star = true") != std::string::npos);
  CHECK(text.find("cell.0.freeze_step") != std::string::npos);
  CHECK(text.find("cell.0.byzantine") != std::string::npos);
  CHECK(text.find("csv_hash") != std::string::npos);

  ExperimentConfig lumpy = cfg;
  lumpy.shift = 2;  // gcd(2, 8) > 1
  const ScenarioResult warned = run_scenario(lumpy);
  CHECK(manifest_to_text(warned.manifest).find("warning") != std::string::npos);
}

TEST_CASE("experiment state round trips through its text form") {
  const ExperimentConfig cfg = small_config();
  const ScenarioResult result = run_scenario(cfg);
  REQUIRE_FALSE(result.state_text.empty());
  const ExperimentState state = state_from_text(result.state_text);
  CHECK(state.model.agent_count() == cfg.agent_count);
  CHECK(state.attack_start == cfg.attack.start);
  CHECK(state.byzantine.size() == 2);
  CHECK(state_to_text(state) == result.state_text);
}

TEST_CASE("pattern config is honored and checked against l") {
  ExperimentConfig cfg = small_config();
  cfg.initial_pattern = "11110000";
  CHECK_NOTHROW(run_scenario(cfg));
  cfg.initial_pattern = "11000000";  // popcount 2 but l = 4
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("matrix artifacts round trip") {
  Matrix m(2, 3);
  m << 1.0, -2.5, 3.25e-7, 4.0, 5.0, -6.125;
  const Matrix back = matrix_from_text(matrix_to_text(m));
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(matrix_from_text("2 2\n1 2 3"), ConfigError);
}

TEST_CASE("empirical runs reproduce bitwise for a fixed context") {
  const ExperimentConfig cfg = small_config();
  const ScenarioResult first = run_scenario(cfg);
  const ScenarioResult second = run_scenario(cfg);
  REQUIRE(first.cells.size() == second.cells.size());
  for (std::size_t c = 0; c < first.cells.size(); ++c) {
    const auto& a = first.cells[c].series.mse_empirical;
    const auto& b = second.cells[c].series.mse_empirical;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }
}

TEST_CASE("bcd cells swap in designed patterns at the attack start") {
  ExperimentConfig cfg = small_config();
  cfg.attack.s_modes = {SMode::schedule, SMode::bcd};
  cfg.runs = 4;
  cfg.bcd_sweeps = 3;
  const ScenarioResult result = run_scenario(cfg);
  REQUIRE(result.cells.size() == 2);
  const std::string text = manifest_to_text(result.manifest);
  CHECK(text.find("patterns_hash") != std::string::npos);
  // Designed patterns change the realized series after the attack starts.
  const auto& schedule_cell = result.cells[0].series.mse_prime;
  const auto& bcd_cell = result.cells[1].series.mse_prime;
  bool diverged = false;
  for (std::size_t k = cfg.attack.start + 1; k < schedule_cell.size(); ++k)
    if (schedule_cell[k] != bcd_cell[k]) diverged = true;
  CHECK(diverged);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(cfg.attack.start); ++k)
    CHECK(schedule_cell[k] == bcd_cell[k]);
}
