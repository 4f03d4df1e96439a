#include "adatd/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "adatd/rng.hpp"
#include "adatd/serialization.hpp"

namespace adatd {

AlgorithmKind algorithm_kind_from_name(const std::string& name) {
  if (name == "td0") return AlgorithmKind::kTd0;
  if (name == "ptd0") return AlgorithmKind::kProjectedTd0;
  if (name == "tdlambda") return AlgorithmKind::kTdLambda;
  if (name == "adatd0") return AlgorithmKind::kAdaTd0;
  if (name == "adatdlambda") return AlgorithmKind::kAdaTdLambda;
  throw std::invalid_argument(
      "unknown algorithm '" + name +
      "' (known: td0, ptd0, tdlambda, adatd0, adatdlambda)");
}

bool algorithm_uses_trace(AlgorithmKind kind) {
  return kind == AlgorithmKind::kTdLambda || kind == AlgorithmKind::kAdaTdLambda;
}

bool algorithm_is_adaptive(AlgorithmKind kind) {
  return kind == AlgorithmKind::kAdaTd0 || kind == AlgorithmKind::kAdaTdLambda;
}

void ExperimentConfig::validate() const {
  if (n_seeds < 1) throw std::invalid_argument("config: n_seeds >= 1");
  if (n_steps < 0) throw std::invalid_argument("config: n_steps >= 0");
  if (horizon < 0) throw std::invalid_argument("config: horizon >= 0");
  if (log_every < 1) throw std::invalid_argument("config: log_every >= 1");
  if (algorithms.empty())
    throw std::invalid_argument("config: at least one algorithm");
  for (const auto& algo : algorithms) {
    algorithm_kind_from_name(algo.name);  // throws on unknown names
    algo.hp.validate();
    if (!algorithm_uses_trace(algo.kind) && algo.hp.lam != 0.0)
      throw std::invalid_argument("config: algorithm '" + algo.name +
                                  "' has lambda fixed at 0");
  }
}

BuiltProblem build_problem(const ProblemSpec& spec) {
  Mdp mdp;
  std::optional<FeatureMap> file_features;

  switch (spec.kind) {
    case ProblemKind::kRandom:
      mdp = random_mdp(spec.n_states, spec.n_actions, spec.seed, spec.gamma);
      break;
    case ProblemKind::kFile: {
      MdpDocument doc = load_mdp_json(spec.path);
      mdp = std::move(doc.mdp);
      file_features = std::move(doc.features);
      break;
    }
    case ProblemKind::kInline:
      if (!spec.inline_mdp.has_value())
        throw std::invalid_argument("problem: inline kind without an MDP");
      mdp = *spec.inline_mdp;
      file_features = spec.inline_features;
      break;
  }

  FeatureMap features;
  switch (spec.features.kind) {
    case FeatureKind::kTabular:
      features = FeatureMap::tabular(mdp.n_states());
      break;
    case FeatureKind::kAggregation:
      features = aggregation_features(
          mdp.n_states(),
          AggregationScheme::contiguous(mdp.n_states(), spec.features.d));
      break;
    case FeatureKind::kMatrix:
      if (!file_features.has_value())
        throw std::invalid_argument(
            "problem: matrix features requested but none supplied");
      features = *file_features;
      break;
  }
  features.validate();

  BuiltProblem problem{std::move(mdp), std::move(features), {}, {}};
  problem.diag = analyze_chain(problem.mdp, problem.features);
  return problem;
}

double rmsbe_exact(const Mdp& mdp, const FeatureMap& features,
                   const Eigen::VectorXd& pi, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd values = features.phi * theta;
  const Eigen::VectorXd residual = bellman_apply(mdp, values) - values;
  return pi.dot(residual.cwiseProduct(residual));
}

namespace {

struct Cell {
  int algo_index = 0;
  int seed_index = 0;
};

MetricSeries run_cell(const ExperimentConfig& config,
                      const BuiltProblem& problem, const Cell& cell,
                      RmsbeMode rmsbe_mode) {
  const AlgorithmSpec& algo = config.algorithms[cell.algo_index];
  const Mdp& mdp = problem.mdp;
  const FeatureMap& features = problem.features;
  const Eigen::VectorXd& pi = problem.diag.pi;
  const Eigen::VectorXd& theta_star =
      problem.fixed_points.at(algo.hp.lam).theta_star;

  MetricSeries series;
  series.algorithm =
      std::to_string(cell.algo_index) + "_" + algo.name;
  series.seed = cell.seed_index;

  const std::uint64_t stream = derive_stream_seed(
      config.master_seed, static_cast<std::uint64_t>(cell.algo_index),
      static_cast<std::uint64_t>(cell.seed_index));
  Rng start_rng(stream);
  const int start = start_rng.uniform_int(mdp.n_states());
  ChainSampler sampler(mdp, start, start_rng.raw());

  AdaTdState state = AdaTdState::initial(features.dim());

  double window_sq_sum = 0.0;  // empirical mode: mean d_k^2 since last log
  long window_count = 0;

  auto metric = [&](const AdaTdState& s) {
    if (rmsbe_mode == RmsbeMode::kExact)
      return rmsbe_exact(mdp, features, pi, s.theta);
    return window_count > 0 ? window_sq_sum / static_cast<double>(window_count)
                            : 0.0;
  };
  auto log_point = [&](long k, const AdaTdState& s) {
    Checkpoint cp;
    cp.k = k;
    cp.dist_sq = (s.theta - theta_star).squaredNorm();
    cp.rmsbe = metric(s);
    cp.v = s.v;
    series.checkpoints.push_back(cp);
    window_sq_sum = 0.0;
    window_count = 0;
  };

  log_point(0, state);
  for (long k = 1; k <= config.n_steps; ++k) {
    if (config.horizon > 0 && (k - 1) % config.horizon == 0) state.z.setZero();
    const Transition t = sampler.next();
    if (rmsbe_mode == RmsbeMode::kEmpirical) {
      const double d = td_error(state.theta, features, t, mdp.discount);
      window_sq_sum += d * d;
      window_count += 1;
    }
    switch (algo.kind) {
      case AlgorithmKind::kTd0:
      case AlgorithmKind::kProjectedTd0:
        projected_td0_step(state, algo.hp, features, t, mdp.discount);
        break;
      case AlgorithmKind::kTdLambda:
        projected_td_lambda_step(state, algo.hp, features, t, mdp.discount);
        break;
      case AlgorithmKind::kAdaTd0:
        ada_td0_step(state, algo.hp, features, t, mdp.discount);
        break;
      case AlgorithmKind::kAdaTdLambda:
        ada_td_lambda_step(state, algo.hp, features, t, mdp.discount);
        break;
    }
    if (state.theta.norm() > algo.hp.radius + 1e-9) {
      std::ostringstream msg;
      msg << "run_experiment: projection contract violated at step " << k
          << " (" << series.algorithm << ", seed " << cell.seed_index
          << "): ||theta|| = " << state.theta.norm() << " > radius "
          << algo.hp.radius;
      throw std::runtime_error(msg.str());
    }
    if (k % config.log_every == 0 || k == config.n_steps) log_point(k, state);
  }
  return series;
}

Checkpoint aggregate_point(const std::vector<const Checkpoint*>& points,
                           int which) {  // 0 mean, 1 min, 2 max
  Checkpoint out = *points.front();
  double dist = which == 0 ? 0.0 : points.front()->dist_sq;
  double rmsbe = which == 0 ? 0.0 : points.front()->rmsbe;
  double v = which == 0 ? 0.0 : points.front()->v;
  for (const Checkpoint* p : points) {
    switch (which) {
      case 0:
        dist += p->dist_sq;
        rmsbe += p->rmsbe;
        v += p->v;
        break;
      case 1:
        dist = std::min(dist, p->dist_sq);
        rmsbe = std::min(rmsbe, p->rmsbe);
        v = std::min(v, p->v);
        break;
      default:
        dist = std::max(dist, p->dist_sq);
        rmsbe = std::max(rmsbe, p->rmsbe);
        v = std::max(v, p->v);
        break;
    }
  }
  if (which == 0) {
    const double n = static_cast<double>(points.size());
    dist /= n;
    rmsbe /= n;
    v /= n;
  }
  out.dist_sq = dist;
  out.rmsbe = rmsbe;
  out.v = v;
  return out;
}

}  // namespace

OverlayResult bound_overlay(const std::vector<Checkpoint>& mean_series,
                            double lam, const ConstantInputs& inputs,
                            const std::string& label) {
  OverlayResult result;
  result.annotated = mean_series;

  double running_min = std::numeric_limits<double>::infinity();
  for (auto& cp : result.annotated) {
    if (cp.k < 2) continue;  // the rate statement needs K >= 2
    cp.bound = theorem_bound(lam, inputs, cp.k);
    cp.has_bound = true;
    running_min = std::min(running_min, cp.dist_sq);
    const int k0 = delayed_expectation_window(cp.k, inputs.rho);
    if (cp.k >= k0 && running_min > cp.bound) {
      std::ostringstream msg;
      msg << label << ": running-min mean dist_sq " << running_min
          << " exceeds the rate bound " << cp.bound << " at k = " << cp.k;
      result.violations.push_back(msg.str());
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int n_threads,
                                RmsbeMode rmsbe_mode) {
  config.validate();

  ExperimentResult result{{}, {}, {}, build_problem(config.problem)};
  for (const auto& algo : config.algorithms) {
    if (!result.problem.fixed_points.count(algo.hp.lam))
      result.problem.fixed_points.emplace(
          algo.hp.lam,
          fixed_point_td_lambda(result.problem.mdp, result.problem.features,
                                result.problem.diag.pi, algo.hp.lam));
  }

  std::vector<Cell> cells;
  for (int a = 0; a < static_cast<int>(config.algorithms.size()); ++a)
    for (int s = 0; s < config.n_seeds; ++s) cells.push_back({a, s});
  result.runs.resize(cells.size());

  const int workers = std::max(
      1, std::min(n_threads, static_cast<int>(cells.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      result.runs[i] = run_cell(config, result.problem, cells[i], rmsbe_mode);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size() || failed.load()) return;
          try {
            result.runs[i] =
                run_cell(config, result.problem, cells[i], rmsbe_mode);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            failed.store(true);
            if (error_message.empty()) error_message = e.what();
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error(error_message);
  }

  // Aggregate in config order; identical regardless of thread count.
  for (int a = 0; a < static_cast<int>(config.algorithms.size()); ++a) {
    AggregateSeries agg;
    agg.algorithm = std::to_string(a) + "_" + config.algorithms[a].name;

    std::vector<const MetricSeries*> seeds;
    for (const auto& run : result.runs)
      if (run.algorithm == agg.algorithm) seeds.push_back(&run);

    const std::size_t n_points = seeds.front()->checkpoints.size();
    for (const auto* run : seeds)
      if (run->checkpoints.size() != n_points)
        throw std::runtime_error("run_experiment: ragged checkpoint grids");

    for (std::size_t i = 0; i < n_points; ++i) {
      std::vector<const Checkpoint*> points;
      for (const auto* run : seeds) points.push_back(&run->checkpoints[i]);
      agg.mean.push_back(aggregate_point(points, 0));
      agg.min.push_back(aggregate_point(points, 1));
      agg.max.push_back(aggregate_point(points, 2));
    }

    const AlgorithmSpec& algo = config.algorithms[a];
    if (algorithm_is_adaptive(algo.kind) &&
        std::isfinite(algo.hp.radius)) {
      ConstantInputs inputs;
      inputs.reward_bound = result.problem.mdp.reward_bound;
      inputs.radius = algo.hp.radius;
      inputs.gamma = result.problem.mdp.discount;
      inputs.beta = algo.hp.beta;
      inputs.eta = algo.hp.eta;
      inputs.delta = algo.hp.delta;
      inputs.omega = result.problem.diag.omega;
      inputs.kappa_bar = result.problem.diag.kappa_bar;
      inputs.rho = result.problem.diag.rho;

      OverlayResult overlay =
          bound_overlay(agg.mean, algo.hp.lam, inputs, agg.algorithm);
      agg.mean = overlay.annotated;
      for (auto& v : overlay.violations)
        result.overlay_violations.push_back(std::move(v));

      // Per-seed and min/max rows carry the same bound column.
      for (std::size_t i = 0; i < n_points; ++i) {
        agg.min[i].bound = agg.mean[i].bound;
        agg.min[i].has_bound = agg.mean[i].has_bound;
        agg.max[i].bound = agg.mean[i].bound;
        agg.max[i].has_bound = agg.mean[i].has_bound;
      }
      for (auto& run : result.runs) {
        if (run.algorithm != agg.algorithm) continue;
        for (std::size_t i = 0; i < n_points; ++i) {
          run.checkpoints[i].bound = agg.mean[i].bound;
          run.checkpoints[i].has_bound = agg.mean[i].has_bound;
        }
      }
    }
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_checkpoint_row(std::ostream& out, const Checkpoint& cp) {
  out << cp.k << ',' << format_double(cp.dist_sq) << ','
      << format_double(cp.rmsbe) << ',' << format_double(cp.v) << ',';
  if (cp.has_bound) out << format_double(cp.bound);
  out << '\n';
}

}  // namespace

void emit_csv(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("emit_csv: cannot create directory '" + dir +
                             "': " + ec.message());

  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out)
      throw std::runtime_error("emit_csv: cannot open '" + name +
                               "' under '" + dir + "'");
    return out;
  };

  for (const auto& run : result.runs) {
    std::ostringstream name;
    name << run.algorithm << "_seed" << run.seed << ".csv";
    auto out = open(name.str());
    out << "k,dist_sq,rmsbe,v,bound\n";
    for (const auto& cp : run.checkpoints) write_checkpoint_row(out, cp);
  }

  auto out = open("aggregate.csv");
  out << "algorithm,stat,k,dist_sq,rmsbe,v,bound\n";
  for (const auto& agg : result.aggregates) {
    const std::pair<const char*, const std::vector<Checkpoint>*> blocks[] = {
        {"mean", &agg.mean}, {"min", &agg.min}, {"max", &agg.max}};
    for (const auto& [stat, series] : blocks)
      for (const auto& cp : *series) {
        out << agg.algorithm << ',' << stat << ',';
        write_checkpoint_row(out, cp);
      }
  }

  auto plot = open("plot.gp");
  plot << "# gnuplot stub for the emitted series\n"
          "set datafile separator ','\n"
          "set logscale y\n"
          "set xlabel 'step'\n"
          "set ylabel 'RMSBE (10-seed mean)'\n"
          "plot ";
  bool first = true;
  for (const auto& agg : result.aggregates) {
    if (!first) plot << ", \\\n     ";
    first = false;
    plot << "'aggregate.csv' using 3:($0 > 0 && strcol(1) eq '"
         << agg.algorithm
         << "' && strcol(2) eq 'mean' ? $5 : 1/0) with lines title '"
         << agg.algorithm << "'";
  }
  plot << "\n";
}

}  // namespace adatd
