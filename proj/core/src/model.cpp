#include "brcdf/model.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "brcdf/errors.hpp"

namespace brcdf {

void ObservationModel::validate() const {
  if (H.rows() < 1) throw ConfigError("observation model: H must have at least one row");
  if (R.rows() != R.cols() || R.rows() != H.rows())
    throw ConfigError("observation model: R must be square with dimension matching H rows");
  if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("observation model: R must be symmetric");
  Eigen::LLT<Matrix> llt(R);
  if (llt.info() != Eigen::Success)
    throw ConfigError("observation model: R must be positive definite");
}

void StateSpaceModel::validate() const {
  if (A.rows() != A.cols()) throw ConfigError("model: A must be square");
  if (Q.rows() != A.rows() || Q.cols() != A.cols())
    throw ConfigError("model: Q must match the state dimension");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("model: Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(Q));
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw ConfigError("model: Q must be positive semidefinite");
  for (const auto& agent : this->agents) {
    agent.validate();
    if (agent.state_dim() != state_dim())
      throw ConfigError("model: every H_i must have as many columns as the state dimension");
  }
}

NetworkGraph NetworkGraph::from_edges(int node_count, const std::vector<std::pair<int, int>>& edges) {
  if (node_count < 1) throw ConfigError("graph: node count must be positive");
  NetworkGraph g;
  g.node_count_ = node_count;
  g.neighbors_.assign(node_count, {});
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= node_count || b >= node_count)
      throw ConfigError("graph: edge endpoint out of range");
    if (a == b) throw ConfigError("graph: self-loops are not allowed");
    if (g.adjacent(a, b)) throw ConfigError("graph: duplicate edge");
    g.neighbors_[a].push_back(b);
    g.neighbors_[b].push_back(a);
  }
  for (auto& list : g.neighbors_) std::sort(list.begin(), list.end());
  return g;
}

bool NetworkGraph::adjacent(int i, int j) const {
  const auto& list = neighbors_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

int NetworkGraph::edge_count() const {
  int total = 0;
  for (const auto& list : neighbors_) total += static_cast<int>(list.size());
  return total / 2;
}

Matrix NetworkGraph::adjacency() const {
  Matrix e = Matrix::Zero(node_count_, node_count_);
  for (int i = 0; i < node_count_; ++i)
    for (int j : neighbors_[i]) e(i, j) = 1.0;
  return e;
}

Matrix NetworkGraph::degree_matrix() const {
  Matrix d = Matrix::Zero(node_count_, node_count_);
  for (int i = 0; i < node_count_; ++i) d(i, i) = static_cast<double>(degree(i));
  return d;
}

Matrix NetworkGraph::laplacian() const { return degree_matrix() - adjacency(); }

bool NetworkGraph::connected() const {
  if (node_count_ == 0) return false;
  std::vector<char> seen(node_count_, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int visited = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : neighbors_[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++visited;
        queue.push_back(u);
      }
    }
  }
  return visited == node_count_;
}

std::string NetworkGraph::to_dot() const {
  std::ostringstream out;
  out << "graph g {\n";
  for (int i = 0; i < node_count_; ++i)
    for (int j : neighbors_[i])
      if (i < j) out << "  " << i << " -- " << j << ";\n";
  out << "}\n";
  return out.str();
}

NetworkGraph build_network(std::uint64_t seed, int agent_count, double edge_prob) {
  if (agent_count < 2) throw ConfigError("build_network: agent count must be at least 2");
  if (edge_prob <= 0.0 || edge_prob > 1.0)
    throw ConfigError("build_network: edge_prob must lie in (0, 1]");
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RngStream rng = RngStream::keyed(seed, static_cast<std::uint64_t>(attempt), "graph");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < agent_count; ++i)
      for (int j = i + 1; j < agent_count; ++j)
        if (rng.uniform01() < edge_prob) edges.emplace_back(i, j);
    NetworkGraph g = NetworkGraph::from_edges(agent_count, edges);
    if (g.connected()) return g;
  }
  throw ConfigError("build_network: no connected sample within 1000 attempts; edge_prob too small");
}

std::vector<Vector> simulate_truth(const StateSpaceModel& model, int horizon, const Vector& x0,
                                   RngStream& process_noise) {
  if (horizon < 1) throw ConfigError("simulate_truth: horizon must be at least 1");
  const int m = model.state_dim();
  const bool noiseless = model.Q.cwiseAbs().maxCoeff() == 0.0;
  Matrix root = Matrix::Zero(m, m);
  if (!noiseless) {
    // Q is PSD but may be singular; use an eigenvalue square root.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(model.Q));
    root = eig.eigenvectors() *
           eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
  }
  std::vector<Vector> states;
  states.reserve(horizon + 1);
  states.push_back(x0);
  for (int k = 0; k < horizon; ++k) {
    Vector next = model.A * states.back();
    if (!noiseless) next += root * process_noise.gaussian_vector(m);
    states.push_back(std::move(next));
  }
  return states;
}

Vector observe(const ObservationModel& obs, const Vector& x, RngStream& measurement_noise) {
  Eigen::LLT<Matrix> chol(symmetrized(obs.R));
  if (chol.info() != Eigen::Success)
    throw NumericError("observe: R is not positive definite");
  return obs.H * x + chol.matrixL() * measurement_noise.gaussian_vector(obs.obs_dim());
}

ReferenceSetup reference_setup(std::uint64_t seed, int agent_count, double edge_prob) {
  Matrix block(2, 2);
  block << 0.6, 0.005, 0.25, 0.6;
  Matrix obs_block(4, 4);
  obs_block << 1, 1, 0, 0,
               1, 0, 0, 0,
               0, 0, 1, 0,
               0, 0, 1, 1;
  const Matrix a = kronecker(block, Matrix::Identity(4, 4));
  const Matrix h = kronecker(obs_block, Matrix::Identity(2, 2));
  const int m = static_cast<int>(a.rows());

  ReferenceSetup setup;
  setup.model.A = a;
  setup.model.Q = 0.1 * Matrix::Identity(m, m);
  RngStream mu_stream = RngStream::keyed(seed, 0, "observation-noise-level");
  setup.noise_levels.reserve(agent_count);
  for (int i = 0; i < agent_count; ++i) {
    const double mu = mu_stream.uniform01();
    setup.noise_levels.push_back(mu);
    setup.model.agents.push_back({h, mu * Matrix::Identity(m, m)});
  }
  setup.model.validate();
  setup.graph = build_network(seed, agent_count, edge_prob);
  return setup;
}

}  // namespace brcdf
