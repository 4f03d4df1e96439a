#include "adatd/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace adatd {

void Mdp::validate() const {
  const int n = n_states();
  if (n < 1) throw std::invalid_argument("mdp: needs at least one state");
  if (transition.cols() != n)
    throw std::invalid_argument("mdp: transition matrix must be square");
  if (reward.rows() != n || reward.cols() != n)
    throw std::invalid_argument("mdp: reward table must be |S| x |S|");
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("mdp: discount must lie in (0, 1)");

  for (int s = 0; s < n; ++s) {
    double row_sum = 0.0;
    for (int t = 0; t < n; ++t) {
      const double p = transition(s, t);
      if (!(p >= 0.0)) {
        std::ostringstream msg;
        msg << "mdp: transition(" << s << "," << t << ") = " << p
            << " is negative";
        throw std::invalid_argument(msg.str());
      }
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol) {
      std::ostringstream msg;
      msg << "mdp: transition row " << s << " sums to " << row_sum
          << ", expected 1 within " << kRowSumTol;
      throw std::invalid_argument(msg.str());
    }
  }

  const double max_abs_reward = reward.cwiseAbs().maxCoeff();
  if (max_abs_reward > reward_bound + 1e-12) {
    std::ostringstream msg;
    msg << "mdp: |R(s,s')| reaches " << max_abs_reward
        << ", above the declared bound B = " << reward_bound;
    throw std::invalid_argument(msg.str());
  }
}

Mdp make_mdp(Eigen::MatrixXd transition, Eigen::MatrixXd reward,
             double discount, double reward_bound) {
  Mdp mdp;
  mdp.transition = std::move(transition);
  mdp.reward = std::move(reward);
  mdp.discount = discount;
  mdp.reward_bound =
      reward_bound > 0.0 ? reward_bound : mdp.reward.cwiseAbs().maxCoeff();
  mdp.validate();
  return mdp;
}

Eigen::VectorXd expected_reward(const Mdp& mdp) {
  return (mdp.transition.array() * mdp.reward.array()).rowwise().sum();
}

Mdp random_mdp(int n_states, int n_actions, std::uint64_t seed,
               double discount) {
  if (n_states < 2) throw std::invalid_argument("random_mdp: n_states >= 2");
  if (n_actions < 1) throw std::invalid_argument("random_mdp: n_actions >= 1");

  Rng rng(mix64(seed));
  const int n = n_states;

  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd reward_mass = Eigen::MatrixXd::Zero(n, n);

  for (int a = 0; a < n_actions; ++a) {
    for (int s = 0; s < n; ++s) {
      Eigen::VectorXd row(n);
      for (int t = 0; t < n; ++t) row(t) = rng.uniform_open01();
      row /= row.sum();
      for (int t = 0; t < n; ++t) {
        const double r = rng.uniform_open01();
        transition(s, t) += row(t);
        reward_mass(s, t) += row(t) * r;
      }
    }
  }
  transition /= static_cast<double>(n_actions);
  reward_mass /= static_cast<double>(n_actions);

  // E[R | s -> s'] under the uniform policy.
  Eigen::MatrixXd reward = reward_mass.cwiseQuotient(transition);

  // Row sums may be off 1 by a few ulps after the fold; renormalize.
  for (int s = 0; s < n; ++s) transition.row(s) /= transition.row(s).sum();

  return make_mdp(std::move(transition), std::move(reward), discount,
                  /*reward_bound=*/1.0);
}

ChainSampler::ChainSampler(const Mdp& mdp, int start, std::uint64_t seed)
    : mdp_(&mdp), state_(start), rng_(seed) {
  if (start < 0 || start >= mdp.n_states())
    throw std::invalid_argument("sample_chain: start state out of range");
}

Transition ChainSampler::next() {
  const int n = mdp_->n_states();
  const double u = rng_.uniform01();
  double acc = 0.0;
  int next_state = n - 1;  // guard against acc falling short of 1 by rounding
  for (int t = 0; t < n; ++t) {
    acc += mdp_->transition(state_, t);
    if (u < acc) {
      next_state = t;
      break;
    }
  }
  Transition tr{state_, next_state, mdp_->reward(state_, next_state)};
  state_ = next_state;
  return tr;
}

std::vector<Transition> sample_chain(const Mdp& mdp, int start, long length,
                                     std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("sample_chain: length >= 1");
  ChainSampler sampler(mdp, start, seed);
  std::vector<Transition> out;
  out.reserve(static_cast<std::size_t>(length));
  for (long i = 0; i < length; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace adatd
