#include "adatd/config.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adatd/serialization.hpp"

namespace adatd {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (key == name) known = true;
    if (!known)
      throw std::invalid_argument(context + ": unknown key '" + key + "'");
  }
}

void require(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key))
    throw std::invalid_argument(context + ": missing key '" + key + "'");
}

FeatureSpec parse_features(const json& j) {
  check_keys(j, {"kind", "d"}, "config features");
  require(j, "kind", "config features");
  const std::string kind = j["kind"].get<std::string>();
  FeatureSpec spec;
  if (kind == "tabular") {
    spec.kind = FeatureKind::kTabular;
  } else if (kind == "aggregation") {
    spec.kind = FeatureKind::kAggregation;
    require(j, "d", "config features (aggregation)");
    spec.d = j["d"].get<int>();
  } else if (kind == "matrix") {
    spec.kind = FeatureKind::kMatrix;
  } else {
    throw std::invalid_argument("config features: unknown kind '" + kind +
                                "' (tabular, aggregation, matrix)");
  }
  return spec;
}

ProblemSpec parse_problem(const json& j) {
  require(j, "kind", "config problem");
  const std::string kind = j["kind"].get<std::string>();
  ProblemSpec spec;
  if (kind == "random") {
    check_keys(j, {"kind", "n_states", "n_actions", "gamma", "seed", "features"},
               "config problem (random)");
    require(j, "n_states", "config problem (random)");
    require(j, "gamma", "config problem (random)");
    spec.kind = ProblemKind::kRandom;
    spec.n_states = j["n_states"].get<int>();
    spec.n_actions = j.value("n_actions", 1);
    spec.gamma = j["gamma"].get<double>();
    spec.seed = j.value("seed", std::uint64_t{0});
  } else if (kind == "file") {
    check_keys(j, {"kind", "path", "features"}, "config problem (file)");
    require(j, "path", "config problem (file)");
    spec.kind = ProblemKind::kFile;
    spec.path = j["path"].get<std::string>();
  } else if (kind == "inline") {
    check_keys(j, {"kind", "mdp", "features"}, "config problem (inline)");
    require(j, "mdp", "config problem (inline)");
    spec.kind = ProblemKind::kInline;
    MdpDocument doc = parse_mdp_json(j["mdp"].dump());
    spec.inline_mdp = std::move(doc.mdp);
    spec.inline_features = std::move(doc.features);
  } else {
    throw std::invalid_argument("config problem: unknown kind '" + kind +
                                "' (random, file, inline)");
  }
  if (j.contains("features")) {
    spec.features = parse_features(j["features"]);
  } else {
    spec.features.kind = FeatureKind::kTabular;
  }
  return spec;
}

Hyperparams parse_hyperparams(const json& j, const std::string& context) {
  Hyperparams hp;
  require(j, "eta", context);
  hp.eta = j["eta"].get<double>();
  hp.delta = j.value("delta", 1.0);
  hp.beta = j.value("beta", 0.0);
  hp.lam = j.value("lambda", 0.0);
  hp.radius = j.contains("radius")
                  ? j["radius"].get<double>()
                  : std::numeric_limits<double>::infinity();
  hp.validate();
  return hp;
}

AlgorithmSpec parse_algorithm(const json& j, const std::string& context) {
  check_keys(j, {"name", "eta", "delta", "beta", "lambda", "radius"}, context);
  require(j, "name", context);
  AlgorithmSpec spec;
  spec.name = j["name"].get<std::string>();
  spec.kind = algorithm_kind_from_name(spec.name);
  spec.hp = parse_hyperparams(j, context);
  return spec;
}

ExperimentConfig parse_config_json(const json& j) {
  check_keys(j,
             {"problem", "algorithms", "n_seeds", "n_steps", "horizon",
              "log_every", "master_seed"},
             "config");
  require(j, "problem", "config");
  require(j, "algorithms", "config");
  require(j, "n_steps", "config");

  ExperimentConfig config;
  config.problem = parse_problem(j["problem"]);
  if (!j["algorithms"].is_array() || j["algorithms"].empty())
    throw std::invalid_argument("config: algorithms must be a non-empty array");
  int index = 0;
  for (const auto& a : j["algorithms"]) {
    std::ostringstream ctx;
    ctx << "config algorithms[" << index++ << "]";
    config.algorithms.push_back(parse_algorithm(a, ctx.str()));
  }
  config.n_seeds = j.value("n_seeds", 1);
  config.n_steps = j["n_steps"].get<long>();
  config.horizon = j.value("horizon", 0L);
  config.log_every = j.value("log_every", 1L);
  config.master_seed = j.value("master_seed", std::uint64_t{0});
  config.validate();
  return config;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config json: ") + e.what());
  }
}

std::string slurp(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument(std::string(what) + ": cannot open '" + path +
                                "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  return parse_config_json(parse_text(text));
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(slurp(path, "config"));
}

std::vector<SweepCell> load_sweep(const std::string& path) {
  json j = parse_text(slurp(path, "sweep config"));
  if (!j.contains("algorithms") || !j["algorithms"].is_array())
    throw std::invalid_argument("sweep: algorithms must be an array");

  std::vector<SweepCell> cells;
  int algo_index = 0;
  for (const auto& algo : j["algorithms"]) {
    check_keys(algo, {"name", "eta", "delta", "beta", "lambda", "radius"},
               "sweep algorithm");
    require(algo, "name", "sweep algorithm");

    // Fields listed as arrays sweep; scalars stay fixed.
    const char* fields[] = {"eta", "delta", "beta", "lambda", "radius"};
    std::vector<std::pair<std::string, std::vector<double>>> grids;
    for (const char* field : fields) {
      if (!algo.contains(field)) continue;
      std::vector<double> values;
      if (algo[field].is_array())
        for (const auto& v : algo[field]) values.push_back(v.get<double>());
      else
        values.push_back(algo[field].get<double>());
      grids.emplace_back(field, std::move(values));
    }

    std::vector<std::size_t> sizes, idx(grids.size(), 0);
    for (const auto& g : grids) sizes.push_back(g.second.size());

    for (;;) {
      json cell_algo = json::object();
      cell_algo["name"] = algo["name"];
      std::ostringstream label;
      label << algo_index << "_" << algo["name"].get<std::string>();
      for (std::size_t i = 0; i < grids.size(); ++i) {
        const double value = grids[i].second[idx[i]];
        cell_algo[grids[i].first] = value;
        if (sizes[i] > 1)
          label << "_" << grids[i].first << format_value(value);
      }

      json cell = j;
      cell["algorithms"] = json::array({cell_algo});
      cells.push_back({label.str(), parse_config_json(cell)});

      // odometer advance over the per-field value lists
      std::size_t pos = 0;
      while (pos < idx.size()) {
        if (++idx[pos] < sizes[pos]) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == idx.size()) break;
    }
    ++algo_index;
  }
  return cells;
}

}  // namespace adatd
