#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "adatd/rng.hpp"

namespace adatd {

// Transition rows must be stochastic to this tolerance.
inline constexpr double kRowSumTol = 1e-12;

// Finite-state chain under a fixed policy: transition kernel, per-transition
// rewards, and discount. Immutable after construction in normal use.
struct Mdp {
  Eigen::MatrixXd transition;  // row s holds P(.|s)
  Eigen::MatrixXd reward;      // R(s, s')
  double discount = 0.0;       // gamma in (0, 1)
  double reward_bound = 0.0;   // declared B with |R(s,s')| <= B

  int n_states() const { return static_cast<int>(transition.rows()); }

  // Throws std::invalid_argument naming the failing check.
  void validate() const;
};

// Builds and validates. reward_bound <= 0 means "derive as max |R(s,s')|".
Mdp make_mdp(Eigen::MatrixXd transition, Eigen::MatrixXd reward,
             double discount, double reward_bound = 0.0);

// R(s) = sum_s' P(s'|s) R(s,s').
Eigen::VectorXd expected_reward(const Mdp& mdp);

// Random problem: per-(state, action) transition rows and rewards drawn
// uniformly from (0, 1) (rows normalized), then folded under the uniform
// policy into a single chain. Reward fold is the conditional expectation
// given the realized transition, so sampled rewards match the folded table.
// Declared reward bound is 1.
Mdp random_mdp(int n_states, int n_actions, std::uint64_t seed,
               double discount = 0.9);

struct Transition {
  int s = 0;
  int s_next = 0;
  double r = 0.0;
};

// Streams transitions of the chain. Deterministic given the seed.
class ChainSampler {
 public:
  ChainSampler(const Mdp& mdp, int start, std::uint64_t seed);

  Transition next();
  int state() const { return state_; }

 private:
  const Mdp* mdp_;
  int state_;
  Rng rng_;
};

std::vector<Transition> sample_chain(const Mdp& mdp, int start, long length,
                                     std::uint64_t seed);

}  // namespace adatd
