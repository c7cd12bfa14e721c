#include "brcdf/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "brcdf/errors.hpp"

namespace brcdf {
namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long parsed = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

Variant parse_variant(const std::string& key, const std::string& value) {
  if (value == "suboptimal") return Variant::suboptimal;
  if (value == "full") return Variant::full;
  throw ConfigError(key + ": unknown variant '" + value + "'");
}

SigmaMode parse_sigma_mode(const std::string& key, const std::string& value) {
  if (value == "none") return SigmaMode::none;
  if (value == "random") return SigmaMode::random;
  if (value == "optimal") return SigmaMode::optimal;
  if (value == "per-agent") return SigmaMode::per_agent;
  throw ConfigError(key + ": unknown sigma mode '" + value + "'");
}

SMode parse_s_mode(const std::string& key, const std::string& value) {
  if (value == "schedule") return SMode::schedule;
  if (value == "bcd") return SMode::bcd;
  throw ConfigError(key + ": unknown selection mode '" + value + "'");
}

std::string format_real(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::suboptimal ? "suboptimal" : "full"; }

std::string to_string(SigmaMode v) {
  switch (v) {
    case SigmaMode::none: return "none";
    case SigmaMode::random: return "random";
    case SigmaMode::optimal: return "optimal";
    case SigmaMode::per_agent: return "per-agent";
  }
  return "none";
}

std::string to_string(SMode v) { return v == SMode::schedule ? "schedule" : "bcd"; }

std::string to_string(GammaReference v) {
  return v == GammaReference::full_sharing ? "full" : "per-l";
}

std::string to_string(ReportMode v) { return v == ReportMode::series ? "series" : "steady"; }

void ExperimentConfig::validate(int state_dim) const {
  if (agent_count < 2) throw ConfigError("L: must be at least 2, got " + std::to_string(agent_count));
  if (edge_prob <= 0.0 || edge_prob > 1.0)
    throw ConfigError("edge_prob: must lie in (0, 1]");
  if (shared_counts.empty()) throw ConfigError("l: at least one value required");
  for (int l : shared_counts)
    if (l < 1 || l > state_dim)
      throw ConfigError("l: must lie in [1, " + std::to_string(state_dim) + "], got " +
                        std::to_string(l));
  if (shift < 0) throw ConfigError("tau: must be non-negative");
  if (!initial_pattern.empty() && static_cast<int>(initial_pattern.size()) != state_dim)
    throw ConfigError("selection: pattern length must equal " + std::to_string(state_dim));
  if (gamma_multiplier <= 0.0 || gamma_multiplier > 1.0)
    throw ConfigError("gamma.multiplier: must lie in (0, 1]");
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (runs < 1) throw ConfigError("runs: must be at least 1");
  if (variants.empty()) throw ConfigError("variant: at least one value required");
  if (bcd_sweeps < 1) throw ConfigError("bcd.iterations: must be at least 1");
  if (init_state_sigma < 0.0) throw ConfigError("init.state_sigma: must be non-negative");
  if (init_estimate_scatter < 0.0) throw ConfigError("init.estimate_scatter: must be non-negative");
  if (attack.enabled) {
    if (attack.start < 1 || attack.start >= horizon)
      throw ConfigError("attack.k0: must lie in [1, horizon)");
    if (attack.byzantine_counts.empty()) throw ConfigError("attack.count: at least one value required");
    for (int b : attack.byzantine_counts)
      if (b < 1 || b > agent_count)
        throw ConfigError("attack.count: must lie in [1, L], got " + std::to_string(b));
    if (attack.etas.empty()) throw ConfigError("attack.eta: at least one value required");
    for (double eta : attack.etas)
      if (eta <= 0.0) throw ConfigError("attack.eta: must be positive");
    if (attack.sigma_modes.empty())
      throw ConfigError("attack.sigma_mode: at least one value required");
    if (attack.s_modes.empty()) throw ConfigError("attack.s_mode: at least one value required");
    for (SMode s : attack.s_modes)
      if (s == SMode::bcd &&
          std::all_of(attack.sigma_modes.begin(), attack.sigma_modes.end(),
                      [](SigmaMode v) { return v == SigmaMode::none; }))
        throw ConfigError("attack.s_mode: bcd requires a nonzero sigma mode");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(key + ": empty value");

    if (key == "master_seed") {
      cfg.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "L") {
      cfg.agent_count = static_cast<int>(parse_int(key, value));
    } else if (key == "edge_prob") {
      cfg.edge_prob = parse_real(key, value);
    } else if (key == "l") {
      cfg.shared_counts.clear();
      for (const auto& item : split_list(value))
        cfg.shared_counts.push_back(static_cast<int>(parse_int(key, item)));
    } else if (key == "tau") {
      cfg.shift = static_cast<int>(parse_int(key, value));
    } else if (key == "selection") {
      std::string pattern = value;
      if (pattern.size() >= 2 && pattern.front() == '"' && pattern.back() == '"')
        pattern = pattern.substr(1, pattern.size() - 2);
      cfg.initial_pattern = pattern;
    } else if (key == "gamma.multiplier") {
      cfg.gamma_multiplier = parse_real(key, value);
    } else if (key == "gamma.reference") {
      if (value == "full")
        cfg.gamma_reference = GammaReference::full_sharing;
      else if (value == "per-l")
        cfg.gamma_reference = GammaReference::per_l;
      else
        throw ConfigError(key + ": expected full or per-l");
    } else if (key == "horizon") {
      cfg.horizon = static_cast<int>(parse_int(key, value));
    } else if (key == "runs") {
      cfg.runs = static_cast<int>(parse_int(key, value));
    } else if (key == "variant") {
      cfg.variants.clear();
      for (const auto& item : split_list(value)) cfg.variants.push_back(parse_variant(key, item));
    } else if (key == "report") {
      if (value == "series")
        cfg.report = ReportMode::series;
      else if (value == "steady")
        cfg.report = ReportMode::steady;
      else
        throw ConfigError(key + ": expected series or steady");
    } else if (key == "attack.enabled") {
      cfg.attack.enabled = parse_bool(key, value);
    } else if (key == "attack.count") {
      cfg.attack.byzantine_counts.clear();
      for (const auto& item : split_list(value))
        cfg.attack.byzantine_counts.push_back(static_cast<int>(parse_int(key, item)));
    } else if (key == "attack.k0") {
      cfg.attack.start = static_cast<int>(parse_int(key, value));
    } else if (key == "attack.eta") {
      cfg.attack.etas.clear();
      for (const auto& item : split_list(value))
        cfg.attack.etas.push_back(parse_real(key, item));
    } else if (key == "attack.sigma_mode") {
      cfg.attack.sigma_modes.clear();
      for (const auto& item : split_list(value))
        cfg.attack.sigma_modes.push_back(parse_sigma_mode(key, item));
    } else if (key == "attack.s_mode") {
      cfg.attack.s_modes.clear();
      for (const auto& item : split_list(value))
        cfg.attack.s_modes.push_back(parse_s_mode(key, item));
    } else if (key == "bcd.iterations") {
      cfg.bcd_sweeps = static_cast<int>(parse_int(key, value));
    } else if (key == "init.state_sigma") {
      cfg.init_state_sigma = parse_real(key, value);
    } else if (key == "init.estimate_scatter") {
      cfg.init_estimate_scatter = parse_real(key, value);
    } else if (key == "output.dir") {
      cfg.output_dir = value;
    } else if (key == "label") {
      cfg.label = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "label = " << cfg.label << "\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  out << "L = " << cfg.agent_count << "\n";
  out << "edge_prob = " << format_real(cfg.edge_prob) << "\n";
  out << "l = ";
  for (std::size_t i = 0; i < cfg.shared_counts.size(); ++i)
    out << (i ? "," : "") << cfg.shared_counts[i];
  out << "\n";
  out << "tau = " << cfg.shift << "\n";
  if (!cfg.initial_pattern.empty()) out << "selection = \"" << cfg.initial_pattern << "\"\n";
  out << "gamma.multiplier = " << format_real(cfg.gamma_multiplier) << "\n";
  out << "gamma.reference = " << to_string(cfg.gamma_reference) << "\n";
  out << "horizon = " << cfg.horizon << "\n";
  out << "runs = " << cfg.runs << "\n";
  out << "variant = ";
  for (std::size_t i = 0; i < cfg.variants.size(); ++i)
    out << (i ? "," : "") << to_string(cfg.variants[i]);
  out << "\n";
  out << "report = " << to_string(cfg.report) << "\n";
  out << "attack.enabled = " << (cfg.attack.enabled ? "true" : "false") << "\n";
  if (cfg.attack.enabled) {
    out << "attack.count = ";
    for (std::size_t i = 0; i < cfg.attack.byzantine_counts.size(); ++i)
      out << (i ? "," : "") << cfg.attack.byzantine_counts[i];
    out << "\n";
    out << "attack.k0 = " << cfg.attack.start << "\n";
    out << "attack.eta = ";
    for (std::size_t i = 0; i < cfg.attack.etas.size(); ++i)
      out << (i ? "," : "") << format_real(cfg.attack.etas[i]);
    out << "\n";
    out << "attack.sigma_mode = ";
    for (std::size_t i = 0; i < cfg.attack.sigma_modes.size(); ++i)
      out << (i ? "," : "") << to_string(cfg.attack.sigma_modes[i]);
    out << "\n";
    out << "attack.s_mode = ";
    for (std::size_t i = 0; i < cfg.attack.s_modes.size(); ++i)
      out << (i ? "," : "") << to_string(cfg.attack.s_modes[i]);
    out << "\n";
    out << "bcd.iterations = " << cfg.bcd_sweeps << "\n";
  }
  out << "init.state_sigma = " << format_real(cfg.init_state_sigma) << "\n";
  out << "init.estimate_scatter = " << format_real(cfg.init_estimate_scatter) << "\n";
  out << "output.dir = " << cfg.output_dir << "\n";
  return out.str();
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.label = name;
  if (name == "fig2") {
    cfg.attack.enabled = false;
    cfg.horizon = 100;
  } else if (name == "fig3") {
    cfg.attack.enabled = true;
    cfg.variants = {Variant::suboptimal, Variant::full};
    cfg.attack.sigma_modes = {SigmaMode::random};
  } else if (name == "fig5") {
    cfg.attack.enabled = true;
    cfg.attack.sigma_modes = {SigmaMode::random};
    cfg.attack.s_modes = {SMode::schedule, SMode::bcd};
  } else if (name == "fig6") {
    cfg.attack.enabled = true;
    cfg.attack.sigma_modes = {SigmaMode::random, SigmaMode::optimal};
  } else if (name == "fig7") {
    cfg.attack.enabled = true;
    cfg.attack.sigma_modes = {SigmaMode::random, SigmaMode::optimal};
    cfg.horizon = 200;
  } else if (name == "fig8") {
    cfg.attack.enabled = true;
    cfg.report = ReportMode::steady;
    cfg.attack.byzantine_counts = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.attack.sigma_modes = {SigmaMode::per_agent};
    cfg.runs = 20;
  } else if (name == "fig9") {
    cfg.attack.enabled = true;
    cfg.report = ReportMode::steady;
    cfg.attack.etas = {6.25, 12.5, 18.75, 25.0, 31.25, 37.5, 43.75, 50.0};
    cfg.attack.sigma_modes = {SigmaMode::random};
    cfg.runs = 20;
  } else {
    throw ConfigError("preset: unknown name '" + name + "'");
  }
  return cfg;
}

}  // namespace brcdf
