#include "brcdf/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "brcdf/errors.hpp"

namespace brcdf {
namespace {

std::vector<int> support_coordinates(const std::vector<int>& byzantine, int state_dim) {
  std::vector<int> support;
  support.reserve(byzantine.size() * state_dim);
  for (int agent : byzantine)
    for (int r = 0; r < state_dim; ++r) support.push_back(agent * state_dim + r);
  return support;
}

Matrix extract(const Matrix& joint, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = joint(rows[r], cols[c]);
  return out;
}

// Next subset of fixed size in lexicographic index order; false when done.
bool next_combination(std::vector<int>& subset, int universe) {
  const int k = static_cast<int>(subset.size());
  for (int i = k - 1; i >= 0; --i) {
    if (subset[i] < universe - (k - i)) {
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Quadratic/linear reduction of the objective restricted to one member's
// diagonal pattern s: s^T G s + c^T s + constant.
struct Restriction {
  Matrix quad;   // G = U_bb (Hadamard) Sigma_bb
  Vector lin;    // c
};

Restriction build_restriction(const AttackObjectiveContext& ctx, int member,
                              const std::vector<std::vector<int>>& member_patterns,
                              const Matrix& sigma) {
  const int m = ctx.state_dim();
  const auto& byz = ctx.byzantine();
  const int self = byz[member];
  Restriction r;
  r.quad = ctx.u(member, member).cwiseProduct(
      sigma.block(self * m, self * m, m, m).transpose());
  r.lin = Vector::Zero(m);
  for (std::size_t other = 0; other < byz.size(); ++other) {
    if (static_cast<int>(other) == member) continue;
    const int peer = byz[other];
    // S_j as an index set applied to the two linear traces:
    // tr(U_bj S_j Sigma_jb S_b) + tr(U_jb S_b Sigma_bj S_j).
    const Matrix& u_bj = ctx.u(member, static_cast<int>(other));
    const Matrix& u_jb = ctx.u(static_cast<int>(other), member);
    const Matrix sigma_jb = sigma.block(peer * m, self * m, m, m);
    const Matrix sigma_bj = sigma.block(self * m, peer * m, m, m);
    for (int a = 0; a < m; ++a) {
      double first = 0.0, second = 0.0;
      for (int q : member_patterns[other]) {
        first += u_bj(a, q) * sigma_jb(q, a);
        second += sigma_bj(a, q) * u_jb(q, a);
      }
      r.lin[a] += first + second;
    }
  }
  return r;
}

double evaluate(const Restriction& r, const std::vector<int>& ones) {
  double value = 0.0;
  for (int a : ones) {
    value += r.lin[a];
    for (int b : ones) value += r.quad(a, b);
  }
  return value;
}

// Euclidean projection onto {0 <= s <= 1, sum s <= budget}.
Vector project_capped_box(Vector s, double budget) {
  Vector clipped = s.cwiseMax(0.0).cwiseMin(1.0);
  if (clipped.sum() <= budget) return clipped;
  double lo = 0.0, hi = s.maxCoeff();
  for (int iter = 0; iter < 100; ++iter) {
    const double shift = 0.5 * (lo + hi);
    const double total = (s.array() - shift).cwiseMax(0.0).cwiseMin(1.0).sum();
    if (total > budget)
      lo = shift;
    else
      hi = shift;
  }
  return (s.array() - hi).cwiseMax(0.0).cwiseMin(1.0);
}

SubproblemResult relaxed_subproblem(const Restriction& r, int m, int budget) {
  Vector s = Vector::Constant(m, std::min(1.0, static_cast<double>(budget) / m));
  const double lipschitz = r.quad.cwiseAbs().sum() + 1.0;
  for (int iter = 0; iter < 500; ++iter) {
    const Vector grad = (r.quad + r.quad.transpose()) * s + r.lin;
    s = project_capped_box(s + grad / lipschitz, budget);
  }
  // Top-l rounding of the relaxed iterate.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[a] > s[b]; });
  std::vector<int> ones(order.begin(), order.begin() + budget);
  std::sort(ones.begin(), ones.end());
  SubproblemResult result;
  result.ones = std::move(ones);
  result.objective = evaluate(r, result.ones);
  return result;
}

}  // namespace

std::vector<int> AttackPlan::membership() const {
  std::vector<int> z(agent_count, 0);
  for (int agent : byzantine) z[agent] = 1;
  return z;
}

void AttackPlan::validate() const {
  if (sigma.rows() != agent_count * state_dim || sigma.cols() != sigma.rows())
    throw ConfigError("attack plan: sigma dimension mismatch");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericError("attack plan: sigma not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(sigma));
  if (eig.eigenvalues().minCoeff() < -1e-8)
    throw NumericError("attack plan: sigma not positive semidefinite");
  if (sigma.trace() > stealth_budget + 1e-9)
    throw NumericError("attack plan: sigma trace exceeds the stealth budget");
  const std::vector<int> z = membership();
  const int m = state_dim;
  for (int i = 0; i < agent_count; ++i)
    for (int j = 0; j < agent_count; ++j) {
      if (z[i] == 1 && z[j] == 1) continue;
      if (sigma.block(i * m, j * m, m, m).cwiseAbs().maxCoeff() != 0.0)
        throw NumericError("attack plan: nonzero block outside the Byzantine set");
    }
}

std::vector<int> byzantine_set(const NetworkGraph& graph, int count) {
  if (count < 1 || count > graph.size())
    throw ConfigError("byzantine_set: count must lie in [1, agent count]");
  std::vector<int> order(graph.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (graph.degree(a) != graph.degree(b)) return graph.degree(a) > graph.degree(b);
    return a < b;
  });
  std::vector<int> chosen(order.begin(), order.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

PerturbationSampler::PerturbationSampler(const AttackPlan& plan) {
  plan.validate();
  total_dim_ = plan.agent_count * plan.state_dim;
  support_ = support_coordinates(plan.byzantine, plan.state_dim);
  const Matrix sub = extract(plan.sigma, support_, support_);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(sub));
  factor_ = eig.eigenvectors() *
            eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector PerturbationSampler::draw(RngStream& rng) const {
  Vector delta = Vector::Zero(total_dim_);
  if (support_.empty()) return delta;
  const Vector sub = factor_ * rng.gaussian_vector(static_cast<Eigen::Index>(support_.size()));
  for (std::size_t idx = 0; idx < support_.size(); ++idx) delta[support_[idx]] = sub[idx];
  return delta;
}

Matrix u_matrix(int i, int j, const std::vector<Matrix>& consensus, const NetworkGraph& graph) {
  const int m = static_cast<int>(consensus.front().rows());
  Matrix u = Matrix::Zero(m, m);
  const auto& a = graph.neighbors(i);
  const auto& b = graph.neighbors(j);
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  for (int q : common) u += consensus[q].transpose() * consensus[q];
  return u;
}

AttackObjectiveContext::AttackObjectiveContext(const NetworkGraph& graph,
                                               const std::vector<Matrix>& consensus,
                                               std::vector<int> byzantine)
    : graph_(&graph),
      consensus_(&consensus),
      byzantine_(std::move(byzantine)),
      state_dim_(static_cast<int>(consensus.front().rows())) {
  const int count = static_cast<int>(byzantine_.size());
  u_.reserve(count * count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b)
      u_.push_back(u_matrix(byzantine_[a], byzantine_[b], consensus, graph));
}

double attack_objective(const AttackObjectiveContext& context,
                        const std::vector<SelectionSchedule>& byzantine_selections,
                        const Matrix& sigma) {
  const auto& byz = context.byzantine();
  if (byzantine_selections.size() != byz.size())
    throw ConfigError("attack_objective: one selection per Byzantine member required");
  const int m = context.state_dim();
  double total = 0.0;
  for (std::size_t a = 0; a < byz.size(); ++a) {
    for (std::size_t b = 0; b < byz.size(); ++b) {
      // tr(U_ab S_b Sigma_ba S_a) over the selected rows/columns only.
      const Matrix& u = context.u(static_cast<int>(a), static_cast<int>(b));
      const Matrix sigma_ba = sigma.block(byz[b] * m, byz[a] * m, m, m);
      for (int r : byzantine_selections[a].ones())
        for (int c : byzantine_selections[b].ones()) total += u(r, c) * sigma_ba(c, r);
    }
  }
  return total;
}

SubproblemResult bcd_subproblem(const AttackObjectiveContext& context, int member,
                                const std::vector<std::vector<int>>& member_patterns,
                                const Matrix& sigma, int budget) {
  const int m = context.state_dim();
  if (budget < 1 || budget > m)
    throw ConfigError("bcd_subproblem: budget must lie in [1, state dimension]");
  const Restriction restriction = build_restriction(context, member, member_patterns, sigma);
  if (m > 16) return relaxed_subproblem(restriction, m, budget);

  // Patterns with at least one entry: a member that shares nothing would be
  // conspicuous, and keeping the search inside the schedule domain preserves
  // exact coordinate ascent from any valid starting pattern.
  SubproblemResult best;
  bool have_best = false;
  for (int size = budget; size >= 1; --size) {
    std::vector<int> subset(size);
    std::iota(subset.begin(), subset.end(), 0);
    do {
      const double value = evaluate(restriction, subset);
      if (!have_best || value > best.objective) {
        best.objective = value;
        best.ones = subset;
        have_best = true;
      }
    } while (next_combination(subset, m));
  }
  best.used_smaller_budget = static_cast<int>(best.ones.size()) < budget;
  return best;
}

BcdResult bcd_design(const AttackObjectiveContext& context, const Matrix& sigma, int budget,
                     int sweeps, const std::vector<SelectionSchedule>& initial) {
  if (sweeps < 1) throw ConfigError("bcd_design: at least one sweep required");
  const auto& byz = context.byzantine();
  if (initial.size() != byz.size())
    throw ConfigError("bcd_design: one initial selection per Byzantine member required");

  std::vector<std::vector<int>> patterns;
  patterns.reserve(initial.size());
  for (const auto& sched : initial) patterns.push_back(sched.ones());

  BcdResult result;
  std::vector<SelectionSchedule> current = initial;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t member = 0; member < byz.size(); ++member) {
      SubproblemResult sub =
          bcd_subproblem(context, static_cast<int>(member), patterns, sigma, budget);
      patterns[member] = sub.ones;
      result.any_smaller_budget |= static_cast<int>(sub.ones.size()) < budget;
      current[member] =
          SelectionSchedule(context.state_dim(), current[member].shift(), sub.ones);
      result.objective_trace.push_back(attack_objective(context, current, sigma));
    }
  }
  result.designed = std::move(current);
  return result;
}

Matrix masked_gamma(const std::vector<Matrix>& consensus, const NetworkGraph& graph,
                    const std::vector<SelectionSchedule>& selections_at_start,
                    const std::vector<int>& byzantine) {
  Matrix gamma = assemble_gamma(consensus, graph, selections_at_start);
  const int m = static_cast<int>(consensus.front().rows());
  std::vector<char> is_byzantine(graph.size(), 0);
  for (int agent : byzantine) is_byzantine[agent] = 1;
  for (int a = 0; a < graph.size(); ++a)
    if (!is_byzantine[a]) gamma.middleCols(a * m, m).setZero();
  return gamma;
}

CovarianceDesign design_covariance(const Matrix& gamma_at_start, double eta,
                                   const std::vector<int>& byzantine, int state_dim) {
  if (eta <= 0.0) throw ConfigError("design_covariance: eta must be positive");
  CovarianceDesign design;
  design.sigma = Matrix::Zero(gamma_at_start.rows(), gamma_at_start.cols());
  const std::vector<int> support = support_coordinates(byzantine, state_dim);
  const Matrix gamma_sub = [&] {
    Matrix out(gamma_at_start.rows(), support.size());
    for (std::size_t c = 0; c < support.size(); ++c) out.col(c) = gamma_at_start.col(support[c]);
    return out;
  }();
  const Matrix gram = symmetrized(gamma_sub.transpose() * gamma_sub);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const double top = eig.eigenvalues().maxCoeff();
  if (top <= 1e-14 * std::max(1.0, gram.cwiseAbs().maxCoeff())) {
    design.degenerate = true;
    design.objective = 0.0;
    return design;
  }
  Vector v = eig.eigenvectors().col(gram.rows() - 1);
  // Deterministic sign: largest-magnitude entry positive, lowest index on ties.
  int pivot = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
  if (v[pivot] < 0.0) v = -v;
  for (std::size_t r = 0; r < support.size(); ++r)
    for (std::size_t c = 0; c < support.size(); ++c)
      design.sigma(support[r], support[c]) = eta * v[r] * v[c];
  design.objective = eta * top;
  return design;
}

Matrix random_covariance(const std::vector<int>& byzantine, double eta, int state_dim,
                         int agent_count, RngStream& rng) {
  if (eta <= 0.0) throw ConfigError("random_covariance: eta must be positive");
  const std::vector<int> support = support_coordinates(byzantine, state_dim);
  const int dim = static_cast<int>(support.size());
  Matrix w(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) w(r, c) = rng.gaussian();
  Matrix sub = w * w.transpose();
  sub *= eta / sub.trace();
  Matrix sigma = Matrix::Zero(agent_count * state_dim, agent_count * state_dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) sigma(support[r], support[c]) = sub(r, c);
  return sigma;
}

Matrix per_agent_covariance(const std::vector<int>& byzantine, double eta, int state_dim,
                            int agent_count, int max_members) {
  if (max_members < static_cast<int>(byzantine.size()))
    throw ConfigError("per_agent_covariance: max_members below the Byzantine count");
  const double level = eta / (static_cast<double>(state_dim) * max_members);
  Matrix sigma = Matrix::Zero(agent_count * state_dim, agent_count * state_dim);
  for (int agent : byzantine)
    sigma.block(agent * state_dim, agent * state_dim, state_dim, state_dim) =
        level * Matrix::Identity(state_dim, state_dim);
  return sigma;
}

}  // namespace brcdf
