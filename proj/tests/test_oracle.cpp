#include "adatd/oracle.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace adatd;

TEST_CASE("bellman operator") {
  const Mdp mdp = random_mdp(5, 2, 17);

  SUBCASE("zero value gives the expected reward") {
    CHECK((bellman_apply(mdp, Eigen::VectorXd::Zero(5)) - expected_reward(mdp))
              .norm() == 0.0);
  }

  SUBCASE("the true value function is a fixed point") {
    const Eigen::VectorXd v = true_value_function(mdp);
    CHECK((bellman_apply(mdp, v) - v).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SUBCASE("matches the element-wise double loop") {
    Rng rng(123);
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = rng.uniform01() * 10.0 - 5.0;
    CHECK((bellman_apply(mdp, v) - oracles::bellman_by_loops(mdp, v))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }

  SUBCASE("affinity: superposition of the linear part") {
    Rng rng(7);
    Eigen::VectorXd v1(5), v2(5);
    for (int i = 0; i < 5; ++i) {
      v1(i) = rng.uniform01() * 4.0 - 2.0;
      v2(i) = rng.uniform01() * 4.0 - 2.0;
    }
    const double a = 0.3;
    const Eigen::VectorXd mixed = bellman_apply(mdp, a * v1 + (1.0 - a) * v2);
    const Eigen::VectorXd split =
        a * bellman_apply(mdp, v1) + (1.0 - a) * bellman_apply(mdp, v2);
    CHECK((mixed - split).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("true value function") {
  SUBCASE("zero rewards give zero values") {
    Eigen::MatrixXd p(2, 2);
    p << 0.4, 0.6, 0.3, 0.7;
    const Mdp mdp = make_mdp(p, Eigen::MatrixXd::Zero(2, 2), 0.9, 1.0);
    CHECK(true_value_function(mdp).norm() == 0.0);
  }

  SUBCASE("self-loop evaluates the geometric series") {
    // Both states loop with reward 1: V = 1 / (1 - gamma).
    Eigen::MatrixXd p(2, 2);
    p << 1.0, 0.0, 0.0, 1.0;
    const Mdp mdp = make_mdp(p, Eigen::MatrixXd::Ones(2, 2), 0.8, 1.0);
    CHECK(true_value_function(mdp)(0) == doctest::Approx(5.0).epsilon(1e-12));
  }

  SUBCASE("agrees with the truncated return series") {
    const Mdp mdp = random_mdp(5, 2, 23);
    // gamma^T below 1e-13 makes the tail negligible.
    const int horizon =
        static_cast<int>(std::ceil(std::log(1e-13) / std::log(mdp.discount)));
    const Eigen::VectorXd series = oracles::value_by_series(mdp, horizon);
    CHECK((true_value_function(mdp) - series).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("limiting update direction") {
  const Mdp mdp = random_mdp(5, 2, 29);
  const Eigen::VectorXd pi = stationary_distribution(mdp);
  const FeatureMap features = FeatureMap::tabular(5);

  SUBCASE("vanishes at the fixed point") {
    const FixedPoint fp = fixed_point_td0(mdp, features, pi);
    CHECK(limiting_direction(mdp, features, pi, fp.theta_star).norm() <= 1e-10);
  }

  SUBCASE("tabular reduction: Diag(pi)(R + gamma P theta - theta)") {
    Rng rng(5);
    Eigen::VectorXd theta(5);
    for (int i = 0; i < 5; ++i) theta(i) = rng.uniform01() * 2.0 - 1.0;
    const Eigen::VectorXd expected = pi.cwiseProduct(
        expected_reward(mdp) + mdp.discount * (mdp.transition * theta) - theta);
    CHECK((limiting_direction(mdp, features, pi, theta) - expected)
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }

  SUBCASE("matches the stationary Monte-Carlo mean within 3 sigma") {
    Rng rng(11);
    Eigen::VectorXd theta(5);
    for (int i = 0; i < 5; ++i) theta(i) = rng.uniform01() * 2.0 - 1.0;
    const Eigen::VectorXd g = limiting_direction(mdp, features, pi, theta);
    const auto mc =
        oracles::semi_gradient_mc(mdp, features.phi, pi, theta, 1000000, 321);
    for (int i = 0; i < 5; ++i)
      CHECK(std::abs(mc.mean(i) - g(i)) <= mc.stderr3(i));
  }
}

TEST_CASE("td(0) fixed point") {
  SUBCASE("tabular fixed point is the true value function") {
    const Mdp mdp = random_mdp(6, 3, 41);
    const Eigen::VectorXd pi = stationary_distribution(mdp);
    const FixedPoint fp = fixed_point_td0(mdp, FeatureMap::tabular(6), pi);
    CHECK((fp.theta_star - true_value_function(mdp)).cwiseAbs().maxCoeff() <=
          1e-9);
    CHECK(fp.residual <= 1e-10);
    CHECK(fp.condition > 0.0);
  }

  SUBCASE("zero rewards give the zero fixed point") {
    Eigen::MatrixXd p(3, 3);
    p << 0.2, 0.5, 0.3, 0.4, 0.2, 0.4, 0.25, 0.5, 0.25;
    const Mdp mdp = make_mdp(p, Eigen::MatrixXd::Zero(3, 3), 0.9, 1.0);
    const Eigen::VectorXd pi = stationary_distribution(mdp);
    const FixedPoint fp = fixed_point_td0(
        mdp, aggregation_features(3, AggregationScheme::contiguous(3, 2)), pi);
    CHECK(fp.theta_star.norm() <= 1e-12);
  }

  SUBCASE("agrees with damped fixed-point iteration on aggregated features") {
    const Mdp mdp = random_mdp(50, 4, 83);
    const Eigen::VectorXd pi = stationary_distribution(mdp);
    const FeatureMap features =
        aggregation_features(50, AggregationScheme::contiguous(50, 10));
    const FixedPoint fp = fixed_point_td0(mdp, features, pi);

    // theta <- theta + eta g(theta) contracts toward the unique zero.
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(10);
    const double eta = 1.0;
    for (int it = 0; it < 200000; ++it) {
      const Eigen::VectorXd g = limiting_direction(mdp, features, pi, theta);
      theta += eta * g;
      if (g.norm() <= 1e-12) break;
    }
    CHECK(limiting_direction(mdp, features, pi, theta).norm() <= 1e-12);
    CHECK((theta - fp.theta_star).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("lambda-averaged bellman operator") {
  const Mdp mdp = random_mdp(5, 2, 53);

  SUBCASE("lam = 0 is the one-step operator") {
    Rng rng(5);
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = rng.uniform01() * 6.0 - 3.0;
    CHECK((lambda_bellman_apply(mdp, v, 0.0, 0) - bellman_apply(mdp, v))
              .norm() == 0.0);
  }

  SUBCASE("the true value function is fixed for any lam") {
    const Eigen::VectorXd v = true_value_function(mdp);
    for (double lam : {0.0, 0.3, 0.5, 0.9}) {
      const Eigen::VectorXd tv =
          lambda_bellman_apply(mdp, v, lam, lambda_series_length(lam));
      CHECK((tv - v).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  SUBCASE("series matches the resolvent closed form") {
    Rng rng(9);
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = rng.uniform01() * 6.0 - 3.0;
    for (double lam : {0.1, 0.5, 0.7}) {
      const Eigen::VectorXd series =
          lambda_bellman_apply(mdp, v, lam, lambda_series_length(lam));
      const LambdaBellmanForm form = lambda_bellman_closed_form(mdp, lam);
      const Eigen::VectorXd closed = form.offset + form.multi * v;
      CHECK((series - closed).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  SUBCASE("lam = 1 series form is rejected") {
    CHECK_THROWS_AS(lambda_bellman_apply(mdp, Eigen::VectorXd::Zero(5), 1.0, 10),
                    std::invalid_argument);
  }
}

TEST_CASE("td(lambda) fixed point") {
  const Mdp mdp = random_mdp(5, 2, 61);
  const Eigen::VectorXd pi = stationary_distribution(mdp);
  FeatureMap features;
  features.phi.resize(5, 2);
  features.phi << 0.9, 0.1, 0.5, 0.5, 0.1, 0.8, 0.7, 0.2, 0.3, 0.6;

  SUBCASE("lam = 0 coincides with the td(0) solver") {
    const FixedPoint a = fixed_point_td0(mdp, features, pi);
    const FixedPoint b = fixed_point_td_lambda(mdp, features, pi, 0.0);
    CHECK((a.theta_star - b.theta_star).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SUBCASE("lam = 1 tabular recovers the true value function") {
    const FixedPoint fp =
        fixed_point_td_lambda(mdp, FeatureMap::tabular(5), pi, 1.0);
    CHECK((fp.theta_star - true_value_function(mdp)).cwiseAbs().maxCoeff() <=
          1e-9);
  }

  SUBCASE("series residual vanishes at the solved point") {
    for (double lam : {0.3, 0.5, 0.7}) {
      const FixedPoint fp = fixed_point_td_lambda(mdp, features, pi, lam);
      CHECK(fp.residual <= 1e-9);
      // Independent residual recomputation through the truncated series.
      const Eigen::VectorXd tv = lambda_bellman_apply(
          mdp, fp.value_vector, lam, lambda_series_length(lam));
      const double residual =
          (features.phi.transpose() * (pi.cwiseProduct(tv - fp.value_vector)))
              .norm();
      CHECK(residual <= 1e-9);
    }
  }
}

TEST_CASE("approximation gap") {
  SUBCASE("tabular features: both sides vanish") {
    const Mdp mdp = random_mdp(4, 2, 71);
    const Eigen::VectorXd pi = stationary_distribution(mdp);
    const auto gap = approximation_gap(mdp, FeatureMap::tabular(4), pi, 0.5);
    CHECK(gap.lhs <= 1e-9);
    CHECK(gap.rhs <= 1e-9);
  }

  SUBCASE("lam = 1 attains the pure projection error") {
    const Mdp mdp = random_mdp(12, 2, 73);
    const Eigen::VectorXd pi = stationary_distribution(mdp);
    const FeatureMap features =
        aggregation_features(12, AggregationScheme::contiguous(12, 4));
    const auto gap = approximation_gap(mdp, features, pi, 1.0);
    CHECK(gap.lhs == doctest::Approx(gap.rhs).epsilon(1e-9));
  }

  SUBCASE("bound holds and tightens along the lambda grid") {
    const Mdp mdp = random_mdp(50, 4, 79);
    const Eigen::VectorXd pi = stationary_distribution(mdp);
    const FeatureMap features =
        aggregation_features(50, AggregationScheme::contiguous(50, 10));
    double previous_lhs = std::numeric_limits<double>::infinity();
    for (double lam : {0.0, 0.3, 0.5, 0.7, 1.0}) {
      const auto gap = approximation_gap(mdp, features, pi, lam);
      CHECK(gap.lhs <= gap.rhs + 1e-9);
      CHECK(gap.lhs <= previous_lhs + 1e-12);
      previous_lhs = gap.lhs;
    }
  }
}
