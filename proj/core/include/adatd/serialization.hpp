#pragma once

#include <map>
#include <optional>
#include <string>

#include "adatd/features.hpp"
#include "adatd/mdp.hpp"
#include "adatd/oracle.hpp"

namespace adatd {

// MDP document: keys `n_states`, `discount`, `transition`, `reward` (arrays
// of rows), optional `features`. Key names are fixed; unknown keys are
// rejected.
struct MdpDocument {
  Mdp mdp;
  std::optional<FeatureMap> features;
};

MdpDocument load_mdp_json(const std::string& path);
MdpDocument parse_mdp_json(const std::string& text);
std::string mdp_to_json(const Mdp& mdp,
                        const std::optional<FeatureMap>& features);
void save_mdp_json(const Mdp& mdp, const std::optional<FeatureMap>& features,
                   const std::string& path);

// Fixed-point export: keys `theta_star`, `lambda`, `residual`, `constants`
// (flat name -> value map).
std::string fixed_point_to_json(const FixedPoint& fp,
                                const std::map<std::string, double>& constants);

}  // namespace adatd
