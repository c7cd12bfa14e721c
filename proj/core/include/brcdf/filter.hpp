#pragma once

#include <vector>

#include "brcdf/model.hpp"
#include "brcdf/selection.hpp"
#include "brcdf/types.hpp"

namespace brcdf {

/// K = A P H^T (R + H P H^T)^{-1}, computed through a factorization solve.
Matrix kalman_gain(const Matrix& P, const Matrix& H, const Matrix& R, const Matrix& A);

/// P+ = Fhat P Fhat^T + K R K^T + Q with Fhat = A - K H; symmetrized.
Matrix riccati_step(const Matrix& P, const ObservationModel& obs, const Matrix& A,
                    const Matrix& Q, const Matrix& K);

struct FixedPointOptions {
  double tol = 1e-11;       // Frobenius delta
  int max_iterations = 100000;
};

/// Iterates the covariance recursion with the optimal local gain from
/// P(0) = I until the Frobenius delta drops below tol.
Matrix steady_state_covariance(const Matrix& A, const Matrix& Q, const ObservationModel& obs,
                               const FixedPointOptions& options = {});

/// C = gamma A Mbar^{-1} with Mbar = P^{-1} + H^T R^{-1} H.
Matrix consensus_gain(double gamma, const Matrix& A, const Matrix& P, const Matrix& H,
                      const Matrix& R);

/// Inputs to the largest provably safe consensus step. lambda_one and
/// lambda_two are the assembled block-diagonal Lm x Lm matrices; gamma_star
/// already carries the 1/sqrt(p_e) factor.
struct StabilityProfile {
  Matrix lambda_one;
  Matrix lambda_two;
  double lambda_min_one = 0.0;
  double lambda_max_coupled_two = 0.0;  // lambda_max((L (x) I) Lambda_II (L (x) I))
  double gamma_star = 0.0;
  double sharing_fraction = 1.0;
};

StabilityProfile gamma_bound(const NetworkGraph& graph, const std::vector<Matrix>& steady_covariances,
                             const StateSpaceModel& model, double sharing_fraction);

/// Per-agent filter state. Gains refresh from the current covariance until
/// frozen.
struct AgentRuntime {
  Vector estimate;
  Matrix covariance;
  Matrix kalman;
  Matrix consensus;
  bool gains_frozen = false;
};

struct ReceivedFragment {
  const SelectionSchedule* selection;  // sender's schedule at this step
  Vector masked_estimate;              // S_j xbar_j
};

/// One estimator update: refresh gains from the current covariance (unless
/// frozen), apply the state update with the neighbor disagreement terms, then
/// advance the covariance one step.
void filter_step(AgentRuntime& agent, const StateSpaceModel& model, const ObservationModel& obs,
                 double gamma, const Vector& y, const std::vector<ReceivedFragment>& received);

/// Gain for the variant that keeps the neighbor cross-covariance terms:
/// K* = ((A - C sum_j S_j) P + C sum_j S_j P_ji) H^T (R + H P H^T)^{-1}.
Matrix optimal_gain_full(const Matrix& P_own, const std::vector<Matrix>& cross_from_neighbors,
                         const std::vector<const SelectionSchedule*>& neighbor_selections,
                         const Matrix& consensus, const Matrix& A, const Matrix& H,
                         const Matrix& R);

/// Deterministic per-step gain sequences. For the reduced-communication
/// variant these come from the local covariance recursion started at
/// P_i(0) = I; the full variant fills its own instance. Gains freeze at the
/// first step where every agent's covariance delta drops below freeze_tol,
/// or at freeze_cap, whichever comes first; queries past the freeze step
/// return the frozen values.
class GainSchedule {
 public:
  static GainSchedule compute(const StateSpaceModel& model, double gamma, int freeze_cap,
                              double freeze_tol = 1e-9);

  int freeze_step() const { return freeze_step_; }
  int agent_count() const { return static_cast<int>(kalman_.size()); }
  const Matrix& kalman(int agent, int step) const { return kalman_[agent][clamp(step)]; }
  const Matrix& consensus(int agent, int step) const { return consensus_[agent][clamp(step)]; }
  const Matrix& fhat(int agent, int step) const { return fhat_[agent][clamp(step)]; }
  const Matrix& covariance(int agent, int step) const { return covariance_[agent][clamp(step)]; }

  /// Builder access for the full-variant engine.
  void push(int agent, Matrix kalman, Matrix consensus, Matrix fhat, Matrix covariance);
  void set_freeze_step(int step) { freeze_step_ = step; }
  void resize_agents(int count);

 private:
  int clamp(int step) const { return step < freeze_step_ ? step : freeze_step_; }
  int freeze_step_ = 0;
  std::vector<std::vector<Matrix>> kalman_;
  std::vector<std::vector<Matrix>> consensus_;
  std::vector<std::vector<Matrix>> fhat_;
  std::vector<std::vector<Matrix>> covariance_;
};

}  // namespace brcdf
