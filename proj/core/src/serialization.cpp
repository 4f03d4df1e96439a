#include "adatd/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

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

Eigen::MatrixXd parse_matrix(const json& j, int rows, int cols,
                             const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw std::invalid_argument(what + ": expected " + std::to_string(rows) +
                                " rows");
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::invalid_argument(what + ": row " + std::to_string(r) +
                                  " must hold " + std::to_string(cols) +
                                  " numbers");
    for (int c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

MdpDocument parse_mdp_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("mdp json: ") + e.what());
  }
  check_keys(j, {"n_states", "discount", "transition", "reward", "features"},
             "mdp json");
  for (const char* key : {"n_states", "discount", "transition", "reward"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("mdp json: missing key '") +
                                  key + "'");

  const int n = j["n_states"].get<int>();
  if (n < 1) throw std::invalid_argument("mdp json: n_states >= 1");

  MdpDocument doc;
  doc.mdp = make_mdp(parse_matrix(j["transition"], n, n, "mdp json transition"),
                     parse_matrix(j["reward"], n, n, "mdp json reward"),
                     j["discount"].get<double>());
  if (j.contains("features")) {
    const json& f = j["features"];
    if (!f.is_array() || f.empty() || !f[0].is_array())
      throw std::invalid_argument("mdp json: features must be rows of numbers");
    FeatureMap features;
    features.phi =
        parse_matrix(f, n, static_cast<int>(f[0].size()), "mdp json features");
    features.validate();
    doc.features = std::move(features);
  }
  return doc;
}

MdpDocument load_mdp_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("mdp json: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mdp_json(buf.str());
}

std::string mdp_to_json(const Mdp& mdp,
                        const std::optional<FeatureMap>& features) {
  json j;
  j["n_states"] = mdp.n_states();
  j["discount"] = mdp.discount;
  j["transition"] = matrix_to_json(mdp.transition);
  j["reward"] = matrix_to_json(mdp.reward);
  if (features.has_value()) j["features"] = matrix_to_json(features->phi);
  return j.dump(2);
}

void save_mdp_json(const Mdp& mdp, const std::optional<FeatureMap>& features,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("mdp json: cannot write '" + path + "'");
  out << mdp_to_json(mdp, features) << '\n';
}

std::string fixed_point_to_json(
    const FixedPoint& fp, const std::map<std::string, double>& constants) {
  json j;
  j["theta_star"] = std::vector<double>(
      fp.theta_star.data(), fp.theta_star.data() + fp.theta_star.size());
  j["lambda"] = fp.lam;
  j["residual"] = fp.residual;
  j["constants"] = json::object();
  for (const auto& [name, value] : constants) j["constants"][name] = value;
  return j.dump(2);
}

}  // namespace adatd
