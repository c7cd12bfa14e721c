#pragma once

#include <vector>

#include "brcdf/analysis.hpp"
#include "brcdf/model.hpp"
#include "brcdf/rng.hpp"
#include "brcdf/selection.hpp"
#include "brcdf/types.hpp"

namespace brcdf {

/// Coordinated perturbation plan: delta(k) ~ N(0, Sigma) with support
/// restricted to the Byzantine block, injected into shared estimates from
/// attack_start onwards.
struct AttackPlan {
  std::vector<int> byzantine;  // sorted agent ids
  Matrix sigma;                // Lm x Lm, exactly zero outside the Byzantine blocks
  double stealth_budget = 0.0; // eta, trace bound
  int attack_start = 0;        // k0
  int state_dim = 0;
  int agent_count = 0;

  std::vector<int> membership() const;  // z, length L
  /// PSD within tolerance, trace within budget, structural zeros exact.
  void validate() const;
};

/// The `count` highest-degree nodes; ties broken by lowest agent index.
std::vector<int> byzantine_set(const NetworkGraph& graph, int count);

/// Draws delta ~ N(0, Sigma) through an eigenvalue factorization of the
/// Byzantine sub-block, so regular agents' components are exactly zero.
class PerturbationSampler {
 public:
  explicit PerturbationSampler(const AttackPlan& plan);
  Vector draw(RngStream& rng) const;

 private:
  int total_dim_;
  std::vector<int> support_;  // global coordinates of the Byzantine block
  Matrix factor_;             // sub-block square root
};

/// Cached quadratic-form data for the attack objective:
/// U_ij = sum_{q in N_i cap N_j} C_q^T C_q for Byzantine pairs.
class AttackObjectiveContext {
 public:
  AttackObjectiveContext(const NetworkGraph& graph, const std::vector<Matrix>& consensus,
                         std::vector<int> byzantine);

  const NetworkGraph& graph() const { return *graph_; }
  const std::vector<Matrix>& consensus() const { return *consensus_; }
  const std::vector<int>& byzantine() const { return byzantine_; }
  int state_dim() const { return state_dim_; }
  /// U block for the a-th and b-th Byzantine members.
  const Matrix& u(int a, int b) const { return u_[a * byzantine_.size() + b]; }

 private:
  const NetworkGraph* graph_;
  const std::vector<Matrix>* consensus_;
  std::vector<int> byzantine_;
  int state_dim_;
  std::vector<Matrix> u_;
};

/// U_ij = sum over common neighbors of C_q^T C_q; zero when the
/// neighborhoods are disjoint.
Matrix u_matrix(int i, int j, const std::vector<Matrix>& consensus, const NetworkGraph& graph);

/// sum_{i,j in B} tr(U_ij S_j Sigma_ji S_i), the injected-noise share of the
/// steady-state error covariance trace.
double attack_objective(const AttackObjectiveContext& context,
                        const std::vector<SelectionSchedule>& byzantine_selections,
                        const Matrix& sigma);

/// Exact maximizer of the objective restricted to one Byzantine member's
/// pattern, the others held fixed. Enumerates every 0/1 diagonal pattern
/// with between one and `budget` ones (budget descending, then lexicographic
/// index sets, first strict improvement kept — so a flat objective yields
/// the lexicographically first full-budget subset). Instances beyond 16
/// coordinates fall back to a relaxed projected ascent with top-l rounding.
struct SubproblemResult {
  std::vector<int> ones;
  double objective = 0.0;          // restriction value at the optimum
  bool used_smaller_budget = false;  // optimum shares fewer than budget entries
};
SubproblemResult bcd_subproblem(const AttackObjectiveContext& context, int member,
                                const std::vector<std::vector<int>>& member_patterns,
                                const Matrix& sigma, int budget);

/// Cyclic sweeps over the Byzantine members in ascending index order, each
/// solving the subproblem exactly against the latest iterates.
struct BcdResult {
  std::vector<SelectionSchedule> designed;  // patterns for the members, in order
  std::vector<double> objective_trace;      // full objective after each solve
  bool any_smaller_budget = false;
};
BcdResult bcd_design(const AttackObjectiveContext& context, const Matrix& sigma, int budget,
                     int sweeps, const std::vector<SelectionSchedule>& initial);

/// Gamma(k0) = C (E (x) I) S(k0) with the columns of regular agents zeroed.
Matrix masked_gamma(const std::vector<Matrix>& consensus, const NetworkGraph& graph,
                    const std::vector<SelectionSchedule>& selections_at_start,
                    const std::vector<int>& byzantine);

/// Closed-form maximizer of tr(Gamma Sigma Gamma^T) over {Sigma PSD,
/// tr(Sigma) <= eta}: Sigma* = eta v v^T with v a unit top eigenvector of
/// Gamma^T Gamma restricted to the Byzantine coordinates. The sign of v is
/// fixed so its largest-magnitude entry (lowest index on ties) is positive.
struct CovarianceDesign {
  Matrix sigma;
  double objective = 0.0;  // eta * lambda_max(Gamma^T Gamma)
  bool degenerate = false; // Gamma == 0, sigma returned as zero
};
CovarianceDesign design_covariance(const Matrix& gamma_at_start, double eta,
                                   const std::vector<int>& byzantine, int state_dim);

/// Baseline: W W^T over the Byzantine block with Gaussian W, scaled so the
/// trace equals eta exactly; zero elsewhere.
Matrix random_covariance(const std::vector<int>& byzantine, double eta, int state_dim,
                         int agent_count, RngStream& rng);

/// Per-agent budget blocks: each Byzantine agent contributes
/// (eta / (state_dim * max_members)) I_m. Nested in the member prefix, so
/// sweeps over the Byzantine count are monotone by construction.
Matrix per_agent_covariance(const std::vector<int>& byzantine, double eta, int state_dim,
                            int agent_count, int max_members);

}  // namespace brcdf
