#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "stac/mdp.hpp"
#include "stac/oracles.hpp"
#include "test_util.hpp"

using stac::PolicyMatrix;
using stac::PolicyParams;
using stac::TabularMdp;

TEST_SUITE("mdp") {

TEST_CASE("random_mdp produces the experiment shape with valid tables") {
  const TabularMdp mdp = stac::random_mdp(10, 5, 0.9, 0);
  CHECK(mdp.num_states == 10);
  CHECK(mdp.num_actions == 5);
  CHECK(mdp.gamma == 0.9);
  CHECK_NOTHROW(mdp.validate());
  CHECK(mdp.reward.minCoeff() >= 0.0);
  CHECK(mdp.reward.maxCoeff() <= 1.0);
  for (int s = 0; s < 10; ++s) CHECK(mdp.initial_dist(s) == 0.1);
  CHECK(mdp.transition.minCoeff() > 0.0);  // flat Dirichlet rows have full support
}

TEST_CASE("random_mdp single-cell simplex normalizes to exactly one") {
  const TabularMdp mdp = stac::random_mdp(1, 1, 0.5, 7);
  CHECK(mdp.transition(0, 0) == 1.0);
  CHECK(mdp.initial_dist(0) == 1.0);
}

TEST_CASE("random_mdp is a deterministic function of the seed") {
  const TabularMdp a = stac::random_mdp(6, 4, 0.8, 123);
  const TabularMdp b = stac::random_mdp(6, 4, 0.8, 123);
  CHECK(a.transition == b.transition);
  CHECK(a.reward == b.reward);
  const TabularMdp c = stac::random_mdp(6, 4, 0.8, 124);
  CHECK(a.reward != c.reward);
}

TEST_CASE("random_mdp invariants hold across 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    CHECK_NOTHROW(stac::random_mdp(6, 4, 0.9, seed).validate());
}

TEST_CASE("random_mdp rejects invalid parameters") {
  CHECK_THROWS_AS(stac::random_mdp(0, 3, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(stac::random_mdp(3, 0, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(stac::random_mdp(3, 2, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(stac::random_mdp(3, 2, -0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(stac::random_mdp(3, 2, 0.9, 0, -2.0, 1.0), std::invalid_argument);
}

TEST_CASE("softmax of zero logits is uniform") {
  const PolicyMatrix pi = stac::softmax_policy(stac::zero_params(4, 5));
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 5; ++a) CHECK(pi.probs(s, a) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("softmax closed form on a (ln 2, 0) row") {
  PolicyParams params = stac::zero_params(1, 2);
  params.logits(0, 0) = std::log(2.0);
  const PolicyMatrix pi = stac::softmax_policy(params);
  CHECK(pi.probs(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(pi.probs(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("softmax survives extreme logits through max subtraction") {
  PolicyParams params = stac::zero_params(1, 2);
  params.logits(0, 0) = 1000.0;
  const PolicyMatrix pi = stac::softmax_policy(params);
  CHECK(pi.probs.allFinite());
  CHECK(std::abs(pi.probs(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(pi.probs(0, 1)) < 1e-12);
}

TEST_CASE("softmax is shift invariant per row") {
  stac::RngStream rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    PolicyParams params = test_util::random_logits(3, 4, 20.0, rng);
    PolicyParams shifted = params;
    const double shift = rng.uniform(-100.0, 100.0);
    shifted.logits.row(1).array() += shift;
    const PolicyMatrix a = stac::softmax_policy(params);
    const PolicyMatrix b = stac::softmax_policy(shifted);
    CHECK((a.probs - b.probs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("softmax rows sum to one and stay positive") {
  stac::RngStream rng(6, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const PolicyMatrix pi =
        stac::softmax_policy(test_util::random_logits(5, 4, 30.0, rng));
    for (int s = 0; s < 5; ++s) {
      CHECK(std::abs(pi.probs.row(s).sum() - 1.0) < 1e-12);
      CHECK(pi.probs.row(s).minCoeff() > 0.0);
    }
  }
}

TEST_CASE("softmax rejects non-finite logits") {
  PolicyParams params = stac::zero_params(2, 2);
  params.logits(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(stac::softmax_policy(params), std::domain_error);
}

TEST_CASE("policy_kernel of a deterministic pair is a 0/1 matrix") {
  const TabularMdp mdp = test_util::cycle_mdp(4, 2, 0.9, 3);
  const PolicyMatrix pi = stac::one_hot_policy({0, 1, 0, 1}, 2);
  const Eigen::MatrixXd kernel = stac::policy_kernel(mdp, pi);
  for (int s = 0; s < 4; ++s) {
    CHECK(kernel.row(s).sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((kernel.row(s).array() == 0.0).count() == 3);
    CHECK(kernel.row(s).maxCoeff() == 1.0);
  }
}

TEST_CASE("policy_kernel under the uniform policy averages action rows") {
  const TabularMdp mdp = stac::random_mdp(5, 3, 0.9, 9);
  const Eigen::MatrixXd kernel =
      stac::policy_kernel(mdp, test_util::uniform_policy(5, 3));
  for (int s = 0; s < 5; ++s) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(5);
    for (int a = 0; a < 3; ++a) mean += mdp.transition.row(mdp.row(s, a)) / 3.0;
    CHECK((kernel.row(s) - mean).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("policy_kernel rows sum to one on random pairs") {
  stac::RngStream rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const TabularMdp mdp = stac::random_mdp(6, 4, 0.9, 100 + trial);
    const Eigen::MatrixXd kernel =
        stac::policy_kernel(mdp, test_util::random_policy(6, 4, rng));
    for (int s = 0; s < 6; ++s) CHECK(std::abs(kernel.row(s).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("policy_kernel rejects shape mismatches") {
  const TabularMdp mdp = stac::random_mdp(4, 3, 0.9, 1);
  CHECK_THROWS_AS(stac::policy_kernel(mdp, test_util::uniform_policy(4, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(stac::expected_reward(mdp, test_util::uniform_policy(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("expected_reward convex-combination cases") {
  const TabularMdp constant = test_util::constant_reward_mdp(4, 3, 0.9, 0.25, 2);
  stac::RngStream rng(12, 0);
  const Eigen::VectorXd r_const =
      stac::expected_reward(constant, test_util::random_policy(4, 3, rng));
  for (int s = 0; s < 4; ++s) CHECK(r_const(s) == doctest::Approx(0.25).epsilon(1e-14));

  const TabularMdp mdp = stac::random_mdp(4, 3, 0.9, 5);
  const Eigen::VectorXd r_hot =
      stac::expected_reward(mdp, stac::one_hot_policy({2, 0, 1, 2}, 3));
  CHECK(r_hot(0) == mdp.reward(0, 2));
  CHECK(r_hot(1) == mdp.reward(1, 0));

  const stac::PolicyMatrix pi = test_util::random_policy(4, 3, rng);
  const Eigen::VectorXd r = stac::expected_reward(mdp, pi);
  for (int s = 0; s < 4; ++s) {
    double brute = 0.0;
    for (int a = 0; a < 3; ++a) brute += pi.probs(s, a) * mdp.reward(s, a);
    CHECK(r(s) == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("mdp file round trip is bit-exact and byte-stable") {
  const TabularMdp mdp = stac::random_mdp(6, 4, 0.95, 77);
  const std::string path = "mdp_roundtrip_test.txt";
  stac::save_mdp(mdp, path);
  const TabularMdp loaded = stac::load_mdp(path);
  CHECK(loaded.num_states == mdp.num_states);
  CHECK(loaded.num_actions == mdp.num_actions);
  CHECK(loaded.gamma == mdp.gamma);
  CHECK(loaded.transition == mdp.transition);
  CHECK(loaded.reward == mdp.reward);
  CHECK(loaded.initial_dist == mdp.initial_dist);

  const std::string again = "mdp_roundtrip_test2.txt";
  stac::save_mdp(loaded, again);
  std::ifstream f1(path), f2(again);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
  std::remove(path.c_str());
  std::remove(again.c_str());
}

TEST_CASE("mdp file errors") {
  const TabularMdp mdp = stac::random_mdp(3, 2, 0.9, 1);
  CHECK_THROWS_AS(stac::save_mdp(mdp, "no_such_dir/mdp.txt"), std::runtime_error);
  CHECK_THROWS_AS(stac::load_mdp("no_such_file.txt"), std::runtime_error);
}

}  // TEST_SUITE
