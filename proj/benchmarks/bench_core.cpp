#include <benchmark/benchmark.h>

#include "brcdf/analysis.hpp"
#include "brcdf/attack.hpp"
#include "brcdf/experiment.hpp"
#include "brcdf/filter.hpp"
#include "brcdf/model.hpp"
#include "brcdf/run.hpp"

namespace {

using namespace brcdf;

struct Fixture {
  ReferenceSetup setup = reference_setup(1);
  double gamma = 0.0;
  GainSchedule gains;
  std::vector<SelectionSchedule> schedules;
  SelectionTimeline timeline;
  AttackPlan plan;

  Fixture() {
    std::vector<Matrix> steady;
    for (const auto& obs : setup.model.agents)
      steady.push_back(steady_state_covariance(setup.model.A, setup.model.Q, obs));
    gamma = 0.9 * gamma_bound(setup.graph, steady, setup.model, 1.0).gamma_star;
    gains = GainSchedule::compute(setup.model, gamma, 29);
    for (int agent = 0; agent < 25; ++agent) {
      RngStream rng = RngStream::keyed(1, agent, "selection");
      schedules.push_back(SelectionSchedule::random(8, 4, 1, rng));
    }
    timeline = roll_schedules(schedules, 160);
    plan.byzantine = byzantine_set(setup.graph, 5);
    plan.stealth_budget = 25.0;
    plan.attack_start = 30;
    plan.state_dim = 8;
    plan.agent_count = 25;
    RngStream rng = RngStream::keyed(1, 0, "sigma-random");
    plan.sigma = random_covariance(plan.byzantine, 25.0, 8, 25, rng);
  }
};

const Fixture& fixture() {
  static Fixture instance;
  return instance;
}

void RiccatiFixedPoint(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    const Matrix p =
        steady_state_covariance(f.setup.model.A, f.setup.model.Q, f.setup.model.agents[0]);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(RiccatiFixedPoint);

void JointErrorStep(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<Matrix> consensus, kalman, fhat;
  for (int i = 0; i < 25; ++i) {
    consensus.push_back(f.gains.consensus(i, f.gains.freeze_step()));
    kalman.push_back(f.gains.kalman(i, f.gains.freeze_step()));
    fhat.push_back(f.gains.fhat(i, f.gains.freeze_step()));
  }
  NetworkErrorState step;
  step.covariance = initial_joint_covariance(25, 8, 1.0, 0.0);
  step.transition = assemble_atilde(fhat, consensus, f.setup.graph, f.schedules);
  step.process = assemble_qtilde(kalman, f.setup.model);
  step.injection = assemble_gamma(consensus, f.setup.graph, f.schedules);
  for (auto _ : state) {
    network_error_step(step, f.plan.sigma);
    benchmark::DoNotOptimize(step.covariance);
  }
}
BENCHMARK(JointErrorStep);

void PatternDesignSweep(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<Matrix> consensus;
  for (int i = 0; i < 25; ++i) consensus.push_back(f.gains.consensus(i, f.gains.freeze_step()));
  const AttackObjectiveContext context(f.setup.graph, consensus, f.plan.byzantine);
  std::vector<SelectionSchedule> members;
  for (int agent : f.plan.byzantine) members.push_back(f.timeline[30][agent]);
  for (auto _ : state) {
    const BcdResult result = bcd_design(context, f.plan.sigma, 4, 10, members);
    benchmark::DoNotOptimize(result.objective_trace);
  }
}
BENCHMARK(PatternDesignSweep);

void CovarianceDesignEigen(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<Matrix> consensus;
  for (int i = 0; i < 25; ++i) consensus.push_back(f.gains.consensus(i, f.gains.freeze_step()));
  const Matrix gamma_k0 = masked_gamma(consensus, f.setup.graph, f.timeline[30], f.plan.byzantine);
  for (auto _ : state) {
    const CovarianceDesign design = design_covariance(gamma_k0, 25.0, f.plan.byzantine, 8);
    benchmark::DoNotOptimize(design.objective);
  }
}
BENCHMARK(CovarianceDesignEigen);

void SingleMonteCarloRun(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    RunInputs inputs;
    inputs.model = &f.setup.model;
    inputs.graph = &f.setup.graph;
    inputs.selections = &f.timeline;
    inputs.gains = &f.gains;
    inputs.attack = &f.plan;
    inputs.horizon = 160;
    inputs.truth_start = Vector::Zero(8);
    inputs.initial_estimates.assign(25, Vector::Zero(8));
    RunStreams streams;
    streams.process = RngStream::keyed(1, 0, "truth-noise");
    streams.observation = RngStream::keyed(1, 0, "observation-noise");
    streams.attack = RngStream::keyed(1, 0, "attack-noise");
    const RunResult run = run_network_filter(inputs, std::move(streams));
    benchmark::DoNotOptimize(run.mse);
  }
}
BENCHMARK(SingleMonteCarloRun);

}  // namespace

BENCHMARK_MAIN();
