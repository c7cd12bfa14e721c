#include "brcdf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brcdf/errors.hpp"

namespace brcdf {
namespace {

int state_dim_of(const std::vector<Matrix>& blocks) {
  return static_cast<int>(blocks.front().rows());
}

// Masks rows and columns of the joint matrix by the realized selection
// patterns: S(k) X S(k) without forming S.
Matrix select_both_sides(const Matrix& joint, const std::vector<SelectionSchedule>& selections,
                         int state_dim) {
  Matrix out = Matrix::Zero(joint.rows(), joint.cols());
  std::vector<int> kept;
  for (std::size_t a = 0; a < selections.size(); ++a)
    for (int index : selections[a].ones()) kept.push_back(static_cast<int>(a) * state_dim + index);
  for (int r : kept)
    for (int c : kept) out(r, c) = joint(r, c);
  return out;
}

}  // namespace

Matrix assemble_atilde(const std::vector<Matrix>& diagonal_blocks,
                       const std::vector<Matrix>& consensus, const NetworkGraph& graph,
                       const std::vector<SelectionSchedule>& selections) {
  const int count = graph.size();
  const int m = state_dim_of(diagonal_blocks);
  Matrix out = Matrix::Zero(count * m, count * m);
  for (int i = 0; i < count; ++i) {
    out.block(i * m, i * m, m, m) = diagonal_blocks[i];
    for (int j : graph.neighbors(i)) {
      // block (i, j) = C_i S_j: pick the selected columns of C_i.
      for (int column : selections[j].ones())
        out.block(i * m, j * m, m, m).col(column) += consensus[i].col(column);
    }
  }
  return out;
}

Matrix assemble_gamma(const std::vector<Matrix>& consensus, const NetworkGraph& graph,
                      const std::vector<SelectionSchedule>& selections) {
  const int count = graph.size();
  const int m = state_dim_of(consensus);
  Matrix out = Matrix::Zero(count * m, count * m);
  for (int i = 0; i < count; ++i)
    for (int j : graph.neighbors(i))
      for (int column : selections[j].ones())
        out.block(i * m, j * m, m, m).col(column) = consensus[i].col(column);
  return out;
}

Matrix assemble_qtilde(const std::vector<Matrix>& kalman, const StateSpaceModel& model) {
  const int count = model.agent_count();
  const int m = model.state_dim();
  Matrix out = Matrix::Zero(count * m, count * m);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) out.block(i * m, j * m, m, m) = model.Q;
  for (int i = 0; i < count; ++i)
    out.block(i * m, i * m, m, m) += kalman[i] * model.agents[i].R * kalman[i].transpose();
  return out;
}

void network_error_step(NetworkErrorState& state, const Matrix& sigma) {
  Matrix next = state.transition * state.covariance * state.transition.transpose() + state.process;
  if (sigma.size() > 0 && sigma.cwiseAbs().maxCoeff() > 0.0)
    next += state.injection * sigma * state.injection.transpose();
  state.covariance = symmetrized(next);
}

double mse_from_cov(const Matrix& joint, int agent_count) {
  return joint.trace() / static_cast<double>(agent_count);
}

double mse_from_cov(const std::vector<Matrix>& per_agent) {
  double total = 0.0;
  for (const auto& block : per_agent) total += block.trace();
  return total / static_cast<double>(per_agent.size());
}

double nmse(const Matrix& joint_steady) { return joint_steady.trace(); }

std::vector<Matrix> attack_term_blocks(const std::vector<Matrix>& consensus,
                                       const NetworkGraph& graph, const Matrix& sigma) {
  const int count = graph.size();
  const int m = state_dim_of(consensus);
  std::vector<Matrix> blocks(count, Matrix::Zero(m, m));
  if (sigma.size() == 0 || sigma.cwiseAbs().maxCoeff() == 0.0) return blocks;
  for (int i = 0; i < count; ++i) {
    Matrix inner = Matrix::Zero(m, m);
    for (int s : graph.neighbors(i))
      for (int p : graph.neighbors(i)) inner += sigma.block(s * m, p * m, m, m);
    blocks[i] = symmetrized(consensus[i] * inner * consensus[i].transpose());
  }
  return blocks;
}

std::vector<Matrix> steady_state_attacked(const std::vector<Matrix>& fhat,
                                          const std::vector<Matrix>& kalman,
                                          const std::vector<Matrix>& consensus,
                                          const StateSpaceModel& model, const NetworkGraph& graph,
                                          const Matrix& sigma, double sharing_fraction,
                                          const FixedPointOptions& options) {
  const int count = model.agent_count();
  const int m = model.state_dim();
  for (int i = 0; i < count; ++i) {
    const double radius = fhat[i].eigenvalues().cwiseAbs().maxCoeff();
    if (radius >= 1.0)
      throw NumericError("steady_state_attacked: agent " + std::to_string(i) +
                         " has unstable closed loop, spectral radius " + std::to_string(radius));
  }
  const std::vector<Matrix> attack = attack_term_blocks(consensus, graph, sigma);
  std::vector<Matrix> covariances(count, Matrix::Identity(m, m));
  for (int i = 0; i < count; ++i) {
    const Matrix constant = symmetrized(kalman[i] * model.agents[i].R * kalman[i].transpose() +
                                        model.Q + sharing_fraction * attack[i]);
    double delta = 0.0;
    bool converged = false;
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
      const Matrix next = symmetrized(fhat[i] * covariances[i] * fhat[i].transpose() + constant);
      delta = (next - covariances[i]).norm();
      covariances[i] = next;
      if (delta < options.tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericError("steady_state_attacked: agent " + std::to_string(i) +
                         " did not converge, last delta " + std::to_string(delta));
  }
  return covariances;
}

Matrix initial_joint_covariance(int agent_count, int state_dim, double state_sigma,
                                double estimate_scatter) {
  const int n = agent_count * state_dim;
  Matrix joint = estimate_scatter * estimate_scatter * Matrix::Identity(n, n);
  const double common = state_sigma * state_sigma;
  for (int i = 0; i < agent_count; ++i)
    for (int j = 0; j < agent_count; ++j)
      joint.block(i * state_dim, j * state_dim, state_dim, state_dim) +=
          common * Matrix::Identity(state_dim, state_dim);
  return joint;
}

std::vector<double> expected_mse_series(const StateSpaceModel& model, const NetworkGraph& graph,
                                        const GainSchedule& gains, const Matrix& sigma,
                                        double sharing_fraction, int attack_start, int horizon,
                                        double initial_scale) {
  const int count = model.agent_count();
  const int m = model.state_dim();
  std::vector<Matrix> frozen_consensus(count);
  for (int i = 0; i < count; ++i) frozen_consensus[i] = gains.consensus(i, gains.freeze_step());
  const std::vector<Matrix> attack = attack_term_blocks(frozen_consensus, graph, sigma);

  std::vector<Matrix> covariances(count, initial_scale * initial_scale * Matrix::Identity(m, m));
  std::vector<double> series;
  series.reserve(horizon + 1);
  series.push_back(mse_from_cov(covariances));
  for (int k = 0; k < horizon; ++k) {
    for (int i = 0; i < count; ++i) {
      const Matrix& fhat = gains.fhat(i, k);
      const Matrix& kal = gains.kalman(i, k);
      Matrix next = fhat * covariances[i] * fhat.transpose() +
                    kal * model.agents[i].R * kal.transpose() + model.Q;
      if (k >= attack_start) next += sharing_fraction * attack[i];
      covariances[i] = symmetrized(next);
    }
    series.push_back(mse_from_cov(covariances));
  }
  return series;
}

std::vector<double> realized_mse_series(const StateSpaceModel& model, const NetworkGraph& graph,
                                        const GainSchedule& gains,
                                        const SelectionTimeline& selections, const Matrix& sigma,
                                        int attack_start, int horizon, double initial_scale) {
  const int count = model.agent_count();
  const int m = model.state_dim();
  const bool attacked = sigma.size() > 0 && sigma.cwiseAbs().maxCoeff() > 0.0;

  std::vector<Matrix> covariances(count, initial_scale * initial_scale * Matrix::Identity(m, m));
  std::vector<double> series;
  series.reserve(horizon + 1);
  series.push_back(mse_from_cov(covariances));
  for (int k = 0; k < horizon; ++k) {
    Matrix masked;
    if (attacked && k >= attack_start)
      masked = select_both_sides(sigma, selections[k], m);
    for (int i = 0; i < count; ++i) {
      const Matrix& fhat = gains.fhat(i, k);
      const Matrix& kal = gains.kalman(i, k);
      Matrix next = fhat * covariances[i] * fhat.transpose() +
                    kal * model.agents[i].R * kal.transpose() + model.Q;
      if (attacked && k >= attack_start) {
        Matrix inner = Matrix::Zero(m, m);
        for (int s : graph.neighbors(i))
          for (int p : graph.neighbors(i)) inner += masked.block(s * m, p * m, m, m);
        const Matrix& consensus = gains.consensus(i, k);
        next += consensus * inner * consensus.transpose();
      }
      covariances[i] = symmetrized(next);
    }
    series.push_back(mse_from_cov(covariances));
  }
  return series;
}

JointSeries joint_error_series(const StateSpaceModel& model, const NetworkGraph& graph,
                               const GainSchedule& gains, const SelectionTimeline& selections,
                               const Matrix& sigma, int attack_start, int horizon,
                               const Matrix& initial_joint) {
  const int count = model.agent_count();
  const bool attacked = sigma.size() > 0 && sigma.cwiseAbs().maxCoeff() > 0.0;

  NetworkErrorState state;
  state.covariance = initial_joint;
  JointSeries result;
  result.mse.reserve(horizon + 1);
  result.mse.push_back(mse_from_cov(state.covariance, count));
  const Matrix zero_sigma;
  for (int k = 0; k < horizon; ++k) {
    std::vector<Matrix> consensus(count), coupled(count), kalman(count);
    for (int i = 0; i < count; ++i) {
      consensus[i] = gains.consensus(i, k);
      kalman[i] = gains.kalman(i, k);
      // Exact diagonal: A - K H - C sum_{j in N_i} S_j.
      Matrix f = gains.fhat(i, k);
      for (int j : graph.neighbors(i))
        for (int column : selections[k][j].ones()) f.col(column) -= consensus[i].col(column);
      coupled[i] = std::move(f);
    }
    state.transition = assemble_atilde(coupled, consensus, graph, selections[k]);
    state.process = assemble_qtilde(kalman, model);
    state.injection = assemble_gamma(consensus, graph, selections[k]);
    network_error_step(state, (attacked && k >= attack_start) ? sigma : zero_sigma);
    result.mse.push_back(mse_from_cov(state.covariance, count));
  }
  result.final_covariance = state.covariance;
  return result;
}

void MetricsSeries::validate() const {
  auto check = [](const std::vector<double>& series, const char* name) {
    for (double v : series)
      if (!std::isfinite(v) || v < 0.0)
        throw NumericError(std::string("metrics: non-finite or negative entry in ") + name);
  };
  check(mse_empirical, "mse_empirical");
  check(mse_prime, "mse_prime");
  check(mse_analytic, "mse_analytic");
}

double tail_average(const std::vector<double>& series, int window) {
  if (series.empty()) throw ConfigError("tail_average: empty series");
  const int n = static_cast<int>(series.size());
  const int w = std::min(std::max(window, 1), n);
  double total = 0.0;
  for (int i = n - w; i < n; ++i) total += series[i];
  return total / w;
}

}  // namespace brcdf
