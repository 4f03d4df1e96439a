#include <benchmark/benchmark.h>

#include "adatd/chain_analysis.hpp"
#include "adatd/harness.hpp"
#include "adatd/learners.hpp"
#include "adatd/oracle.hpp"

using namespace adatd;

namespace {

struct BenchProblem {
  Mdp mdp;
  FeatureMap features;
  Eigen::VectorXd pi;
};

BenchProblem make_problem(int n_states, int clusters) {
  BenchProblem p{random_mdp(n_states, 4, 7),
                 aggregation_features(
                     n_states, AggregationScheme::contiguous(n_states, clusters)),
                 {}};
  p.pi = stationary_distribution(p.mdp);
  return p;
}

}  // namespace

static void BM_AdaTd0Step(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)),
                              static_cast<int>(state.range(0)) / 5);
  Hyperparams hp;
  hp.eta = 0.5;
  hp.delta = 1.0;
  hp.beta = 0.5;
  hp.radius = 100.0;
  AdaTdState learner = AdaTdState::initial(p.features.dim());
  ChainSampler sampler(p.mdp, 0, 11);
  for (auto _ : state) {
    ada_td0_step(learner, hp, p.features, sampler.next(), p.mdp.discount);
    benchmark::DoNotOptimize(learner.theta.data());
  }
}
BENCHMARK(BM_AdaTd0Step)->Arg(50)->Arg(200);

static void BM_AdaTdLambdaStep(benchmark::State& state) {
  const auto p = make_problem(50, 10);
  Hyperparams hp;
  hp.eta = 0.5;
  hp.delta = 1.0;
  hp.beta = 0.5;
  hp.lam = 0.5;
  hp.radius = 100.0;
  AdaTdState learner = AdaTdState::initial(p.features.dim());
  ChainSampler sampler(p.mdp, 0, 11);
  for (auto _ : state) {
    ada_td_lambda_step(learner, hp, p.features, sampler.next(), p.mdp.discount);
    benchmark::DoNotOptimize(learner.theta.data());
  }
}
BENCHMARK(BM_AdaTdLambdaStep);

static void BM_FixedPointSolve(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)),
                              static_cast<int>(state.range(0)) / 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fixed_point_td_lambda(p.mdp, p.features, p.pi, 0.5));
  }
}
BENCHMARK(BM_FixedPointSolve)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

static void BM_RmsbeExact(benchmark::State& state) {
  const auto p = make_problem(50, 10);
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(10, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(rmsbe_exact(p.mdp, p.features, p.pi, theta));
}
BENCHMARK(BM_RmsbeExact);

static void BM_StationaryDistribution(benchmark::State& state) {
  const Mdp mdp = random_mdp(static_cast<int>(state.range(0)), 4, 7);
  for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(mdp));
}
BENCHMARK(BM_StationaryDistribution)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
