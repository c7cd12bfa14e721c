#include "brcdf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "brcdf/errors.hpp"

namespace brcdf {
namespace {

std::string format_full(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

class TokenReader {
 public:
  explicit TokenReader(const std::string& text) : in_(text) {}

  std::string word(const char* what) {
    std::string token;
    if (!(in_ >> token)) throw ConfigError(std::string("state: missing token, expected ") + what);
    return token;
  }
  void expect(const std::string& literal) {
    const std::string token = word(literal.c_str());
    if (token != literal)
      throw ConfigError("state: expected '" + literal + "', got '" + token + "'");
  }
  long integer(const char* what) {
    const std::string token = word(what);
    try {
      return std::stol(token);
    } catch (const std::exception&) {
      throw ConfigError(std::string("state: expected integer for ") + what);
    }
  }
  double real(const char* what) {
    const std::string token = word(what);
    try {
      return std::stod(token);
    } catch (const std::exception&) {
      throw ConfigError(std::string("state: expected number for ") + what);
    }
  }
  Matrix matrix() {
    expect("matrix");
    const long rows = integer("matrix rows");
    const long cols = integer("matrix cols");
    Matrix m(rows, cols);
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) m(r, c) = real("matrix entry");
    return m;
  }

 private:
  std::istringstream in_;
};

void append_matrix(std::ostringstream& out, const Matrix& m) {
  out << "matrix " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_full(m(r, c));
    out << "\n";
  }
}

}  // namespace

std::string format_sig(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("io: cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw ConfigError("io: failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("io: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string content_hash(const std::string& content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::string matrix_to_text(const Matrix& m) {
  std::ostringstream out;
  out << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_full(m(r, c));
    out << "\n";
  }
  return out.str();
}

Matrix matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ConfigError("matrix artifact: bad dimension header");
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      if (!(in >> m(r, c))) throw ConfigError("matrix artifact: truncated values");
  return m;
}

std::string state_to_text(const ExperimentState& state) {
  std::ostringstream out;
  const int count = state.model.agent_count();
  out << "brcdf-state 1\n";
  out << "L " << count << "\n";
  out << "m " << state.model.state_dim() << "\n";
  out << "k0 " << state.attack_start << "\n";
  out << "eta " << format_full(state.eta) << "\n";
  out << "gamma " << format_full(state.gamma) << "\n";
  out << "byzantine " << state.byzantine.size();
  for (int agent : state.byzantine) out << " " << agent;
  out << "\n";
  append_matrix(out, state.model.A);
  append_matrix(out, state.model.Q);
  out << "edges " << state.graph.edge_count() << "\n";
  for (int i = 0; i < state.graph.size(); ++i)
    for (int j : state.graph.neighbors(i))
      if (i < j) out << i << " " << j << "\n";
  for (int i = 0; i < count; ++i) {
    out << "agent " << i << "\n";
    append_matrix(out, state.model.agents[i].H);
    append_matrix(out, state.model.agents[i].R);
    append_matrix(out, state.kalman[i]);
    append_matrix(out, state.consensus[i]);
    out << "schedule " << state.schedules[i].pattern_string() << " "
        << state.schedules[i].shift() << "\n";
  }
  return out.str();
}

ExperimentState state_from_text(const std::string& text) {
  TokenReader reader(text);
  reader.expect("brcdf-state");
  if (reader.integer("version") != 1) throw ConfigError("state: unsupported version");
  ExperimentState state;
  reader.expect("L");
  const int count = static_cast<int>(reader.integer("agent count"));
  reader.expect("m");
  reader.integer("state dimension");
  reader.expect("k0");
  state.attack_start = static_cast<int>(reader.integer("k0"));
  reader.expect("eta");
  state.eta = reader.real("eta");
  reader.expect("gamma");
  state.gamma = reader.real("gamma");
  reader.expect("byzantine");
  const int byz_count = static_cast<int>(reader.integer("byzantine count"));
  for (int i = 0; i < byz_count; ++i)
    state.byzantine.push_back(static_cast<int>(reader.integer("byzantine id")));
  state.model.A = reader.matrix();
  state.model.Q = reader.matrix();
  reader.expect("edges");
  const int edge_count = static_cast<int>(reader.integer("edge count"));
  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < edge_count; ++e) {
    const int a = static_cast<int>(reader.integer("edge endpoint"));
    const int b = static_cast<int>(reader.integer("edge endpoint"));
    edges.emplace_back(a, b);
  }
  state.graph = NetworkGraph::from_edges(count, edges);
  for (int i = 0; i < count; ++i) {
    reader.expect("agent");
    if (reader.integer("agent id") != i) throw ConfigError("state: agents out of order");
    ObservationModel obs;
    obs.H = reader.matrix();
    obs.R = reader.matrix();
    state.model.agents.push_back(std::move(obs));
    state.kalman.push_back(reader.matrix());
    state.consensus.push_back(reader.matrix());
    reader.expect("schedule");
    const std::string pattern = reader.word("schedule pattern");
    const int shift = static_cast<int>(reader.integer("schedule shift"));
    state.schedules.push_back(SelectionSchedule::from_pattern(pattern, shift));
  }
  state.model.validate();
  return state;
}

std::string manifest_to_text(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ostringstream out;
  for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
  return out.str();
}

std::string plot_script_template(const std::string& csv_name, const std::string& label) {
  std::ostringstream out;
  out << "#!/usr/bin/env python3\n"
      << "# Plots " << csv_name << " (" << label << "): one line per cell.\n"
      << "import csv\n"
      << "from collections import defaultdict\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "series = defaultdict(list)\n"
      << "with open('" << csv_name << "') as handle:\n"
      << "    for row in csv.DictReader(handle):\n"
      << "        key = (row['l'], row['variant'], row['sigma_mode'], row['s_mode'])\n"
      << "        series[key].append((int(row['k']), float(row['mse_empirical']),\n"
      << "                            float(row['mse_prime']), float(row['mse_analytic'])))\n\n"
      << "fig, ax = plt.subplots()\n"
      << "for key, points in sorted(series.items()):\n"
      << "    points.sort()\n"
      << "    ks = [p[0] for p in points]\n"
      << "    ax.plot(ks, [p[1] for p in points], label='l=%s %s %s %s' % key)\n"
      << "ax.set_xlabel('k')\n"
      << "ax.set_ylabel('MSE')\n"
      << "ax.legend()\n"
      << "fig.savefig('" << label << ".png', dpi=150)\n";
  return out.str();
}

}  // namespace brcdf
