#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adatd/chain_analysis.hpp"
#include "adatd/constants.hpp"
#include "adatd/features.hpp"
#include "adatd/learners.hpp"
#include "adatd/mdp.hpp"
#include "adatd/oracle.hpp"

namespace adatd {

enum class FeatureKind { kTabular, kAggregation, kMatrix };
enum class ProblemKind { kRandom, kFile, kInline };

struct FeatureSpec {
  FeatureKind kind = FeatureKind::kTabular;
  int d = 0;  // cluster count for aggregation
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kRandom;
  int n_states = 0;
  int n_actions = 1;
  double gamma = 0.9;
  std::uint64_t seed = 0;
  FeatureSpec features;
  std::string path;                          // kFile
  std::optional<Mdp> inline_mdp;             // kInline (or loaded from file)
  std::optional<FeatureMap> inline_features; // matrix features
};

// The known algorithm set; names as they appear in config files.
enum class AlgorithmKind { kTd0, kProjectedTd0, kTdLambda, kAdaTd0, kAdaTdLambda };
AlgorithmKind algorithm_kind_from_name(const std::string& name);
bool algorithm_uses_trace(AlgorithmKind kind);
bool algorithm_is_adaptive(AlgorithmKind kind);

struct AlgorithmSpec {
  std::string name;
  AlgorithmKind kind = AlgorithmKind::kTd0;
  Hyperparams hp;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  int n_seeds = 1;
  long n_steps = 0;
  long horizon = 0;     // 0 = continuing; > 0 resets traces every horizon steps
  long log_every = 1;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct Checkpoint {
  long k = 0;
  double dist_sq = 0.0;
  double rmsbe = 0.0;
  double v = 0.0;
  double bound = 0.0;
  bool has_bound = false;
};

struct MetricSeries {
  std::string algorithm;  // "<index>_<name>"
  int seed = -1;          // -1 for aggregate rows
  std::vector<Checkpoint> checkpoints;
};

struct BuiltProblem {
  Mdp mdp;
  FeatureMap features;
  ChainDiagnostics diag;
  // Fixed points per lambda actually used by the configured algorithms.
  std::map<double, FixedPoint> fixed_points;
};

BuiltProblem build_problem(const ProblemSpec& spec);

// pi-weighted mean squared Bellman residual of Phi theta, computed from the
// model (noise-free).
double rmsbe_exact(const Mdp& mdp, const FeatureMap& features,
                   const Eigen::VectorXd& pi, const Eigen::VectorXd& theta);

enum class RmsbeMode { kExact, kEmpirical };

struct AggregateSeries {
  std::string algorithm;
  std::vector<Checkpoint> mean;
  std::vector<Checkpoint> min;
  std::vector<Checkpoint> max;
};

struct ExperimentResult {
  std::vector<MetricSeries> runs;           // one per (algorithm, seed)
  std::vector<AggregateSeries> aggregates;  // one per algorithm
  std::vector<std::string> overlay_violations;
  BuiltProblem problem;
};

// Runs every (algorithm, seed) cell, each on its own derived RNG stream;
// output is independent of n_threads. Adaptive algorithms with a finite
// radius get the convergence bound annotated and checked (non-fatally)
// against the running-min mean distance.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                int n_threads = 1,
                                RmsbeMode rmsbe_mode = RmsbeMode::kExact);

struct OverlayResult {
  std::vector<Checkpoint> annotated;
  std::vector<std::string> violations;
};

// Annotates each checkpoint with the convergence-rate bound at K = k and
// checks the running minimum of dist_sq against it for k >= K0(k).
OverlayResult bound_overlay(const std::vector<Checkpoint>& mean_series,
                            double lam, const ConstantInputs& inputs,
                            const std::string& label);

// One CSV per run plus aggregate.csv (+ a gnuplot stub); 17 significant
// digits so reruns are byte-identical.
void emit_csv(const ExperimentResult& result, const std::string& dir);

}  // namespace adatd
