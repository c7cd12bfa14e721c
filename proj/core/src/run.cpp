#include "brcdf/run.hpp"

#include <algorithm>
#include <cmath>

#include "brcdf/errors.hpp"

namespace brcdf {

RunResult run_network_filter(const RunInputs& inputs, RunStreams streams) {
  const StateSpaceModel& model = *inputs.model;
  const NetworkGraph& graph = *inputs.graph;
  const SelectionTimeline& selections = *inputs.selections;
  const GainSchedule& gains = *inputs.gains;
  const int count = model.agent_count();
  const int m = model.state_dim();

  if (static_cast<int>(inputs.initial_estimates.size()) != count)
    throw ConfigError("run: one initial estimate per agent required");
  if (static_cast<int>(selections.size()) < inputs.horizon + 1)
    throw ConfigError("run: selection timeline shorter than the horizon");

  Matrix q_root = Matrix::Zero(m, m);
  if (streams.process.has_value()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(model.Q));
    q_root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
             eig.eigenvectors().transpose();
  }
  std::vector<Matrix> r_roots(count);
  if (streams.observation.has_value()) {
    for (int i = 0; i < count; ++i) {
      Eigen::LLT<Matrix> llt(symmetrized(model.agents[i].R));
      if (llt.info() != Eigen::Success) throw NumericError("run: R not positive definite");
      r_roots[i] = llt.matrixL();
    }
  }
  std::optional<PerturbationSampler> sampler;
  if (inputs.attack != nullptr && streams.attack.has_value())
    sampler.emplace(*inputs.attack);

  Vector x = inputs.truth_start;
  std::vector<Vector> estimates = inputs.initial_estimates;

  RunResult result;
  result.mse.reserve(inputs.horizon + 1);
  result.max_error_norm.reserve(inputs.horizon + 1);
  auto record = [&](const Vector& truth) {
    double total = 0.0, worst = 0.0;
    for (const auto& est : estimates) {
      const double err = (est - truth).squaredNorm();
      total += err;
      worst = std::max(worst, std::sqrt(err));
    }
    result.mse.push_back(total / count);
    result.max_error_norm.push_back(worst);
    if (inputs.keep_estimates) result.estimates.push_back(estimates);
    result.truth.push_back(truth);
  };
  record(x);

  std::vector<Vector> fragments(count);
  for (int k = 0; k < inputs.horizon; ++k) {
    Vector delta;
    const bool attacking =
        inputs.attack != nullptr && k >= inputs.attack->attack_start && sampler.has_value();
    if (attacking) delta = sampler->draw(*streams.attack);

    const auto& current = selections[k];
    for (int j = 0; j < count; ++j) {
      Vector shared = estimates[j];
      if (attacking) shared += delta.segment(j * m, m);
      fragments[j] = current[j].mask(shared);
    }

    std::vector<Vector> next(count);
    for (int i = 0; i < count; ++i) {
      const auto& obs = model.agents[i];
      Vector y = obs.H * x;
      if (streams.observation.has_value())
        y += r_roots[i] * streams.observation->gaussian_vector(obs.obs_dim());
      Vector disagreement = Vector::Zero(m);
      for (int j : graph.neighbors(i))
        disagreement += fragments[j] - current[j].mask(estimates[i]);
      next[i] = model.A * estimates[i] +
                gains.kalman(i, k) * (y - obs.H * estimates[i]) +
                gains.consensus(i, k) * disagreement;
    }
    estimates = std::move(next);

    x = model.A * x;
    if (streams.process.has_value()) x += q_root * streams.process->gaussian_vector(m);
    record(x);
  }
  return result;
}

GainSchedule compute_full_gain_schedule(const StateSpaceModel& model, const NetworkGraph& graph,
                                        const SelectionTimeline& selections, double gamma,
                                        int freeze_cap, double freeze_tol) {
  const int count = model.agent_count();
  const int m = model.state_dim();
  GainSchedule schedule;
  schedule.resize_agents(count);

  const int cap = std::min<int>(freeze_cap, static_cast<int>(selections.size()) - 1);
  Matrix joint = Matrix::Identity(count * m, count * m);
  int step = 0;
  while (true) {
    const auto& current = selections[step];
    std::vector<Matrix> consensus(count), kalman(count), coupled(count);
    for (int i = 0; i < count; ++i) {
      const auto& obs = model.agents[i];
      const Matrix p_own = symmetrized(joint.block(i * m, i * m, m, m));
      consensus[i] = consensus_gain(gamma, model.A, p_own, obs.H, obs.R);
      std::vector<Matrix> cross;
      std::vector<const SelectionSchedule*> neighbor_sel;
      for (int j : graph.neighbors(i)) {
        cross.push_back(joint.block(j * m, i * m, m, m));
        neighbor_sel.push_back(&current[j]);
      }
      kalman[i] =
          optimal_gain_full(p_own, cross, neighbor_sel, consensus[i], model.A, obs.H, obs.R);
      Matrix f = model.A - kalman[i] * obs.H;
      schedule.push(i, kalman[i], consensus[i], f, p_own);
      for (int j : graph.neighbors(i))
        for (int column : current[j].ones()) f.col(column) -= consensus[i].col(column);
      coupled[i] = std::move(f);
    }
    NetworkErrorState state;
    state.covariance = joint;
    state.transition = assemble_atilde(coupled, consensus, graph, current);
    state.process = assemble_qtilde(kalman, model);
    state.injection = Matrix();  // attack not visible to the agents
    network_error_step(state, Matrix());
    double max_delta = 0.0;
    for (int i = 0; i < count; ++i)
      max_delta = std::max(max_delta, (state.covariance.block(i * m, i * m, m, m) -
                                       joint.block(i * m, i * m, m, m))
                                          .norm());
    joint = state.covariance;
    if (max_delta < freeze_tol || step >= cap) break;
    ++step;
  }
  schedule.set_freeze_step(step);
  return schedule;
}

FullRun full_filter_run(const RunInputs& inputs, RunStreams streams, const Matrix& sigma,
                        int attack_start, const Matrix& initial_joint) {
  FullRun out;
  out.run = run_network_filter(inputs, std::move(streams));
  out.joint = joint_error_series(*inputs.model, *inputs.graph, *inputs.gains, *inputs.selections,
                                 sigma, attack_start, inputs.horizon, initial_joint);
  return out;
}

}  // namespace brcdf
