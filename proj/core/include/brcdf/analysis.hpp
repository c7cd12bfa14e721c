#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brcdf/filter.hpp"
#include "brcdf/model.hpp"
#include "brcdf/selection.hpp"
#include "brcdf/types.hpp"

namespace brcdf {

/// Network-wide Lm x Lm quantities for the exact joint error propagation
/// P(k+1) = Atilde P Atilde^T + Qtilde + Gamma Sigma Gamma^T.
struct NetworkErrorState {
  Matrix covariance;  // P(k), cross blocks included
  Matrix transition;  // Atilde(k)
  Matrix process;     // Qtilde(k)
  Matrix injection;   // Gamma(k)
};

/// Atilde = diag{diagonal_blocks} + C (E (x) I) S. The caller chooses the
/// diagonal blocks: A - K H for the reduced-communication analysis, or the
/// coupled form A - K H - C sum_j S_j for the exact propagation.
Matrix assemble_atilde(const std::vector<Matrix>& diagonal_blocks,
                       const std::vector<Matrix>& consensus, const NetworkGraph& graph,
                       const std::vector<SelectionSchedule>& selections);

/// Gamma = C (E (x) I) S.
Matrix assemble_gamma(const std::vector<Matrix>& consensus, const NetworkGraph& graph,
                      const std::vector<SelectionSchedule>& selections);

/// Qtilde = diag{K_i R_i K_i^T} + 1 1^T (x) Q (the process noise is common to
/// all agents, so Q fills every block).
Matrix assemble_qtilde(const std::vector<Matrix>& kalman, const StateSpaceModel& model);

/// One exact propagation step; the result is symmetrized in place.
void network_error_step(NetworkErrorState& state, const Matrix& sigma);

/// (1/L) sum_i tr(P_i) from a joint covariance or per-agent blocks.
double mse_from_cov(const Matrix& joint, int agent_count);
double mse_from_cov(const std::vector<Matrix>& per_agent);

/// Trace of the converged joint covariance.
double nmse(const Matrix& joint_steady);

/// Diagonal m x m blocks of (E (x) I) Sigma (E (x) I), sandwiched by the
/// consensus gains: the per-agent share of the expected injected-noise term.
std::vector<Matrix> attack_term_blocks(const std::vector<Matrix>& consensus,
                                       const NetworkGraph& graph, const Matrix& sigma);

/// Per-agent fixed point of the expected steady-state recursion
/// P_i = Fhat_i P_i Fhat_i^T + K_i R_i K_i^T + Q + p_e * attack_block_i.
/// Requires spectral radius of every Fhat_i below one.
std::vector<Matrix> steady_state_attacked(const std::vector<Matrix>& fhat,
                                          const std::vector<Matrix>& kalman,
                                          const std::vector<Matrix>& consensus,
                                          const StateSpaceModel& model, const NetworkGraph& graph,
                                          const Matrix& sigma, double sharing_fraction,
                                          const FixedPointOptions& options = {});

/// Initial joint error covariance for x(0) = xhat + xi with xi ~ N(0, s^2 I)
/// common to all agents plus independent per-agent estimate scatter.
Matrix initial_joint_covariance(int agent_count, int state_dim, double state_sigma,
                                double estimate_scatter);

/// Expected-value covariance series: per-agent recursion with the
/// p_e-scaled attack term from attack_start on. Returns (1/L) sum tr P_i(k)
/// for k = 0..horizon.
std::vector<double> expected_mse_series(const StateSpaceModel& model, const NetworkGraph& graph,
                                        const GainSchedule& gains, const Matrix& sigma,
                                        double sharing_fraction, int attack_start, int horizon,
                                        double initial_scale);

/// Realization-wise covariance series: the same per-agent recursion but with
/// the realized selection matrices in the injected-noise term (no expectation
/// over the schedule). Exhibits the schedule-induced fluctuation.
std::vector<double> realized_mse_series(const StateSpaceModel& model, const NetworkGraph& graph,
                                        const GainSchedule& gains,
                                        const SelectionTimeline& selections, const Matrix& sigma,
                                        int attack_start, int horizon, double initial_scale);

/// Exact joint realized recursion; the reference for Monte-Carlo fidelity
/// checks. Returns the per-step MSE series and the final joint covariance.
struct JointSeries {
  std::vector<double> mse;
  Matrix final_covariance;
};
JointSeries joint_error_series(const StateSpaceModel& model, const NetworkGraph& graph,
                               const GainSchedule& gains, const SelectionTimeline& selections,
                               const Matrix& sigma, int attack_start, int horizon,
                               const Matrix& initial_joint);

/// Per-step metric records for one experiment cell.
struct MetricsSeries {
  std::vector<double> mse_empirical;
  std::vector<double> mse_prime;
  std::vector<double> mse_analytic;
  double steady_empirical = 0.0;
  double steady_prime = 0.0;
  double steady_analytic = 0.0;
  void validate() const;  // all entries finite and non-negative
};

/// Mean of the final window of a series (steady-state summary).
double tail_average(const std::vector<double>& series, int window);

}  // namespace brcdf
