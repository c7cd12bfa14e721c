#include "brcdf/filter.hpp"

#include <cmath>
#include <string>

#include "brcdf/errors.hpp"

namespace brcdf {
namespace {

Matrix solve_spd(const Matrix& lhs, const Matrix& rhs, const char* what) {
  Eigen::LLT<Matrix> llt(symmetrized(lhs));
  if (llt.info() != Eigen::Success) throw NumericError(std::string(what) + ": singular factorization");
  return llt.solve(rhs);
}

}  // namespace

Matrix kalman_gain(const Matrix& P, const Matrix& H, const Matrix& R, const Matrix& A) {
  const Matrix innovation = R + H * P * H.transpose();
  // K innovation = A P H^T, solved against the factorization.
  const Matrix gain_t = solve_spd(innovation, H * P.transpose() * A.transpose(), "kalman_gain");
  Matrix gain = gain_t.transpose();
  if (!gain.allFinite()) throw NumericError("kalman_gain: non-finite gain");
  return gain;
}

Matrix riccati_step(const Matrix& P, const ObservationModel& obs, const Matrix& A,
                    const Matrix& Q, const Matrix& K) {
  const Matrix fhat = A - K * obs.H;
  return symmetrized(fhat * P * fhat.transpose() + K * obs.R * K.transpose() + Q);
}

Matrix steady_state_covariance(const Matrix& A, const Matrix& Q, const ObservationModel& obs,
                               const FixedPointOptions& options) {
  const int m = static_cast<int>(A.rows());
  Matrix P = Matrix::Identity(m, m);
  double delta = 0.0;
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const Matrix K = kalman_gain(P, obs.H, obs.R, A);
    const Matrix next = riccati_step(P, obs, A, Q, K);
    delta = (next - P).norm();
    P = next;
    if (delta < options.tol) return P;
  }
  throw NumericError("steady_state_covariance: no convergence within iteration cap, last delta " +
                     std::to_string(delta));
}

Matrix consensus_gain(double gamma, const Matrix& A, const Matrix& P, const Matrix& H,
                      const Matrix& R) {
  const int m = static_cast<int>(P.rows());
  const Matrix p_inv = solve_spd(P, Matrix::Identity(m, m), "consensus_gain(P)");
  const Matrix r_inv_h = solve_spd(R, H, "consensus_gain(R)");
  const Matrix mbar = symmetrized(p_inv + H.transpose() * r_inv_h);
  const Matrix mbar_inv = solve_spd(mbar, Matrix::Identity(m, m), "consensus_gain(Mbar)");
  return gamma * A * mbar_inv;
}

StabilityProfile gamma_bound(const NetworkGraph& graph, const std::vector<Matrix>& steady_covariances,
                             const StateSpaceModel& model, double sharing_fraction) {
  if (sharing_fraction <= 0.0 || sharing_fraction > 1.0)
    throw ConfigError("gamma_bound: sharing fraction must lie in (0, 1]");
  const int count = model.agent_count();
  if (static_cast<int>(steady_covariances.size()) != count)
    throw ConfigError("gamma_bound: one steady covariance per agent required");
  const int m = model.state_dim();

  StabilityProfile profile;
  profile.sharing_fraction = sharing_fraction;
  profile.lambda_one = Matrix::Zero(count * m, count * m);
  profile.lambda_two = Matrix::Zero(count * m, count * m);
  const Matrix identity = Matrix::Identity(m, m);
  for (int i = 0; i < count; ++i) {
    const auto& obs = model.agents[i];
    const Matrix& P = steady_covariances[i];
    const Matrix info = symmetrized(obs.H.transpose() * solve_spd(obs.R, obs.H, "gamma_bound(R)"));
    Eigen::LLT<Matrix> info_llt(info);
    if (info_llt.info() != Eigen::Success)
      throw NumericError("gamma_bound: H^T R^{-1} H singular for agent " + std::to_string(i));
    const Matrix info_inv = info_llt.solve(identity);
    profile.lambda_one.block(i * m, i * m, m, m) =
        solve_spd(P + info_inv, identity, "gamma_bound(Lambda_I)");
    const Matrix p_inv = solve_spd(P, identity, "gamma_bound(P)");
    profile.lambda_two.block(i * m, i * m, m, m) =
        solve_spd(p_inv + info, identity, "gamma_bound(Lambda_II)");
  }

  const Matrix coupled = kronecker(graph.laplacian(), identity);
  Eigen::SelfAdjointEigenSolver<Matrix> eig_one(symmetrized(profile.lambda_one));
  Eigen::SelfAdjointEigenSolver<Matrix> eig_two(symmetrized(coupled * profile.lambda_two * coupled));
  profile.lambda_min_one = eig_one.eigenvalues().minCoeff();
  profile.lambda_max_coupled_two = eig_two.eigenvalues().maxCoeff();
  if (profile.lambda_min_one <= 0.0 || profile.lambda_max_coupled_two <= 0.0)
    throw NumericError("gamma_bound: eigenvalue extremes not positive");
  profile.gamma_star = std::sqrt(profile.lambda_min_one / profile.lambda_max_coupled_two) /
                       std::sqrt(sharing_fraction);
  return profile;
}

void filter_step(AgentRuntime& agent, const StateSpaceModel& model, const ObservationModel& obs,
                 double gamma, const Vector& y, const std::vector<ReceivedFragment>& received) {
  if (!agent.gains_frozen) {
    agent.kalman = kalman_gain(agent.covariance, obs.H, obs.R, model.A);
    agent.consensus = consensus_gain(gamma, model.A, agent.covariance, obs.H, obs.R);
  }
  Vector disagreement = Vector::Zero(model.state_dim());
  for (const auto& fragment : received) {
    if (fragment.masked_estimate.size() != model.state_dim())
      throw ConfigError("filter_step: fragment dimension mismatch");
    disagreement += fragment.masked_estimate - fragment.selection->mask(agent.estimate);
  }
  agent.estimate = model.A * agent.estimate + agent.kalman * (y - obs.H * agent.estimate) +
                   agent.consensus * disagreement;
  agent.covariance = riccati_step(agent.covariance, obs, model.A, model.Q, agent.kalman);
}

Matrix optimal_gain_full(const Matrix& P_own, const std::vector<Matrix>& cross_from_neighbors,
                         const std::vector<const SelectionSchedule*>& neighbor_selections,
                         const Matrix& consensus, const Matrix& A, const Matrix& H,
                         const Matrix& R) {
  if (cross_from_neighbors.size() != neighbor_selections.size())
    throw ConfigError("optimal_gain_full: one cross covariance per neighbor required");
  const int m = static_cast<int>(P_own.rows());
  Matrix selection_sum = Matrix::Zero(m, m);
  Matrix masked_cross_sum = Matrix::Zero(m, m);
  for (std::size_t idx = 0; idx < neighbor_selections.size(); ++idx) {
    const auto& sel = *neighbor_selections[idx];
    for (int coordinate : sel.ones()) {
      selection_sum(coordinate, coordinate) += 1.0;
      masked_cross_sum.row(coordinate) += cross_from_neighbors[idx].row(coordinate);
    }
  }
  const Matrix combined = (A - consensus * selection_sum) * P_own + consensus * masked_cross_sum;
  const Matrix innovation = R + H * P_own * H.transpose();
  const Matrix gain_t = solve_spd(innovation, H * combined.transpose(), "optimal_gain_full");
  return gain_t.transpose();
}

GainSchedule GainSchedule::compute(const StateSpaceModel& model, double gamma, int freeze_cap,
                                   double freeze_tol) {
  const int count = model.agent_count();
  const int m = model.state_dim();
  GainSchedule schedule;
  schedule.resize_agents(count);

  std::vector<Matrix> covariances(count, Matrix::Identity(m, m));
  int step = 0;
  while (true) {
    double max_delta = 0.0;
    for (int i = 0; i < count; ++i) {
      const auto& obs = model.agents[i];
      Matrix K = kalman_gain(covariances[i], obs.H, obs.R, model.A);
      Matrix C = consensus_gain(gamma, model.A, covariances[i], obs.H, obs.R);
      Matrix fhat = model.A - K * obs.H;
      schedule.push(i, std::move(K), std::move(C), std::move(fhat), covariances[i]);
      const Matrix next =
          riccati_step(covariances[i], obs, model.A, model.Q, schedule.kalman_[i].back());
      max_delta = std::max(max_delta, (next - covariances[i]).norm());
      covariances[i] = next;
    }
    if (max_delta < freeze_tol || step >= freeze_cap) break;
    ++step;
  }
  schedule.set_freeze_step(step);
  return schedule;
}

void GainSchedule::push(int agent, Matrix kalman, Matrix consensus, Matrix fhat,
                        Matrix covariance) {
  kalman_[agent].push_back(std::move(kalman));
  consensus_[agent].push_back(std::move(consensus));
  fhat_[agent].push_back(std::move(fhat));
  covariance_[agent].push_back(std::move(covariance));
}

void GainSchedule::resize_agents(int count) {
  kalman_.resize(count);
  consensus_.resize(count);
  fhat_.resize(count);
  covariance_.resize(count);
}

}  // namespace brcdf
