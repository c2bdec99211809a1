#include <doctest.h>

#include <cmath>

#include "hrl/errors.hpp"
#include "hrl/gp_model.hpp"
#include "oracle.hpp"

using namespace hrl;
using hrl::testing::DenseGptdOracle;
using hrl::testing::random_episode;

namespace {

GPQModel make_model(double nu = 0.0, int cap = 100000, double noise = 5.0,
                    int belief_dim = 4, int n_actions = 3) {
  KernelSpec spec;
  spec.noise_variance = noise;
  std::vector<std::string> names;
  for (int i = 0; i < n_actions; ++i) names.push_back("a" + std::to_string(i));
  return GPQModel(spec, 0.99, nu, cap, belief_dim, std::move(names));
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("empty model: zero mean, prior variance") {
  GPQModel model = make_model();
  Eigen::VectorXd b = vec({0.3, 0.1, 0.0, 0.5});
  for (int a = 0; a < 3; ++a) {
    PosteriorStat p = model.q_posterior_one(b, a);
    CHECK(p.mean == 0.0);
    CHECK(p.variance == doctest::Approx(b.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("single terminal observation matches the one-point closed form") {
  GPQModel model = make_model();
  JointPoint x{vec({1.0, 2.0, 0.0, 0.0}), 1};
  const double k = x.belief.squaredNorm();
  const double s2 = model.spec().noise_variance;
  model.gptd_update({{x, 12.0, 0.99, true}});
  PosteriorStat p = model.q_posterior_one(x.belief, x.action);
  CHECK(p.mean == doctest::Approx(k / (k + s2) * 12.0).epsilon(1e-12));
  CHECK(p.variance == doctest::Approx(k - k * k / (k + s2)).epsilon(1e-12));
}

TEST_CASE("two-step episode matches the dense oracle to 1e-8") {
  GPQModel model = make_model();
  DenseGptdOracle oracle(model.spec());
  EpisodeTransitions ep;
  ep.push_back({{vec({1.0, 0.5, -0.2, 0.1}), 0}, -1.0, 0.99, false});
  ep.push_back({{vec({0.2, -1.0, 0.7, 0.4}), 2}, 19.0, 0.99, true});
  model.gptd_update(ep);
  oracle.add_episode(ep);
  for (const Transition& t : ep) {
    auto [omean, ovar] = oracle.posterior(t.point);
    PosteriorStat p = model.q_posterior_one(t.point.belief, t.point.action);
    CHECK(std::abs(p.mean - omean) < 1e-8);
    CHECK(std::abs(p.variance - ovar) < 1e-8);
  }
}

TEST_CASE("oracle equivalence over random episodes with sparsification disabled") {
  RandomSource rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    GPQModel model = make_model();
    DenseGptdOracle oracle(model.spec());
    EpisodeTransitions ep = random_episode(rng, 4, 3, 6, 0.99);
    model.gptd_update(ep);
    oracle.add_episode(ep);
    for (const Transition& t : ep) {
      auto [omean, ovar] = oracle.posterior(t.point);
      PosteriorStat p = model.q_posterior_one(t.point.belief, t.point.action);
      CHECK(std::abs(p.mean - omean) < 1e-8);
      CHECK(std::abs(p.variance - ovar) < 1e-8);
    }
    for (int q = 0; q < 3; ++q) {
      JointPoint query;
      query.belief =
          Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return rng.normal(0, 1); });
      query.action = rng.uniform_int(3);
      auto [omean, ovar] = oracle.posterior(query);
      PosteriorStat p = model.q_posterior_one(query.belief, query.action);
      CHECK(std::abs(p.mean - omean) < 1e-8);
      CHECK(std::abs(p.variance - ovar) < 1e-8);
    }
  }
}

TEST_CASE("multi-episode accumulation still matches the dense oracle") {
  RandomSource rng(22);
  GPQModel model = make_model();
  DenseGptdOracle oracle(model.spec());
  for (int e = 0; e < 6; ++e) {
    EpisodeTransitions ep = random_episode(rng, 4, 3, 5, 0.99);
    model.gptd_update(ep);
    oracle.add_episode(ep);
  }
  for (int q = 0; q < 10; ++q) {
    JointPoint query;
    query.belief =
        Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return rng.normal(0, 1); });
    query.action = rng.uniform_int(3);
    auto [omean, ovar] = oracle.posterior(query);
    PosteriorStat p = model.q_posterior_one(query.belief, query.action);
    CHECK(std::abs(p.mean - omean) < 1e-7);
    CHECK(std::abs(p.variance - ovar) < 1e-7);
  }
}

TEST_CASE("dictionary admission") {
  SUBCASE("empty dictionary admits anything above the threshold") {
    GPQModel model = make_model(1e-3);
    JointPoint x{vec({1.0, 0.0, 0.0, 0.0}), 0};
    CHECK(model.admit_residual(x) == doctest::Approx(1.0));
    CHECK(model.dictionary_admit(x) == AdmitDecision::Admit);
    JointPoint tiny{vec({1e-3, 0.0, 0.0, 0.0}), 0};
    CHECK(model.dictionary_admit(tiny) == AdmitDecision::RepresentByExisting);
  }
  SUBCASE("a point already in the dictionary is represented by it") {
    GPQModel model = make_model(1e-3);
    JointPoint x{vec({1.0, 2.0, 3.0, 4.0}), 1};
    model.gptd_update({{x, 1.0, 0.99, true}});
    CHECK(model.dictionary_size() == 1);
    CHECK(model.admit_residual(x) <= 1e-6);
    CHECK(model.dictionary_admit(x) == AdmitDecision::RepresentByExisting);
  }
  SUBCASE("orthogonal candidate is admitted with residual k(x,x)") {
    GPQModel model = make_model(1e-3);
    JointPoint e1{vec({1.0, 0.0, 0.0, 0.0}), 0};
    model.gptd_update({{e1, 1.0, 0.99, true}});
    JointPoint e2{vec({0.0, 2.0, 0.0, 0.0}), 0};
    // Dense Gram check: delta = k(e2,e2) - k12^2 / k11 with k12 = 0.
    const double expected = kernel_eval(e2, e2, model.spec());
    CHECK(model.admit_residual(e2) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(model.dictionary_admit(e2) == AdmitDecision::Admit);
  }
  SUBCASE("the dictionary cap stops admission") {
    GPQModel model = make_model(0.0, 2);
    RandomSource rng(5);
    for (int e = 0; e < 4; ++e) model.gptd_update(testing::random_episode(rng, 4, 3, 4, 0.99));
    CHECK(model.dictionary_size() == 2);
  }
}

TEST_CASE("non-finite inputs reject the episode and leave the model unchanged") {
  GPQModel model = make_model();
  JointPoint x{vec({1.0, 0.0, 0.0, 0.0}), 0};
  model.gptd_update({{x, 2.0, 0.99, true}});
  const Eigen::VectorXd alpha_before = model.alpha();

  EpisodeTransitions bad;
  bad.push_back({{vec({1.0, 0.0, 0.0, 0.0}), 1}, std::nan(""), 0.99, true});
  CHECK_THROWS_AS(model.gptd_update(bad), std::invalid_argument);
  bad.clear();
  bad.push_back({{vec({std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0}), 1},
                 1.0,
                 0.99,
                 true});
  CHECK_THROWS_AS(model.gptd_update(bad), std::invalid_argument);
  CHECK(model.dictionary_size() == 1);
  CHECK(model.alpha() == alpha_before);
}

TEST_CASE("posterior variance contracts monotonically under repeated observation") {
  GPQModel model = make_model(1e-3);
  JointPoint x{vec({1.0, 1.0, 0.0, 0.0}), 0};
  double previous = model.q_posterior_one(x.belief, x.action).variance;
  for (int n = 0; n < 10; ++n) {
    model.gptd_update({{x, 7.0, 0.99, true}});
    const double var = model.q_posterior_one(x.belief, x.action).variance;
    CHECK(var < previous);
    previous = var;
  }
}

TEST_CASE("scaling rewards scales posterior means and keeps the greedy argmax") {
  RandomSource rng(31);
  const double c = 3.7;
  GPQModel base = make_model(1e-3);
  GPQModel scaled = make_model(1e-3);
  for (int e = 0; e < 5; ++e) {
    EpisodeTransitions ep = random_episode(rng, 4, 3, 5, 0.99);
    EpisodeTransitions ep_scaled = ep;
    for (Transition& t : ep_scaled) t.reward *= c;
    base.gptd_update(ep);
    scaled.gptd_update(ep_scaled);
  }
  RandomSource greedy_rng(1);
  std::vector<int> actions{0, 1, 2};
  for (int q = 0; q < 20; ++q) {
    Eigen::VectorXd b =
        Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return rng.normal(0, 1); });
    for (int a = 0; a < 3; ++a) {
      PosteriorStat pb = base.q_posterior_one(b, a);
      PosteriorStat ps = scaled.q_posterior_one(b, a);
      CHECK(ps.mean == doctest::Approx(c * pb.mean).epsilon(1e-9));
    }
    CHECK(base.sample_action(b, actions, 0.0, greedy_rng) ==
          scaled.sample_action(b, actions, 0.0, greedy_rng));
  }
}

TEST_CASE("sparsification keeps dictionary-point posteriors within 5% relative") {
  RandomSource rng(41);
  GPQModel exact = make_model(0.0);
  GPQModel sparse = make_model(1e-3);
  // Base points plus near-duplicates that fall below the admission threshold.
  std::vector<EpisodeTransitions> episodes;
  for (int e = 0; e < 5; ++e) {
    EpisodeTransitions ep = random_episode(rng, 4, 3, 4, 0.99);
    episodes.push_back(ep);
    EpisodeTransitions wiggled = ep;
    for (Transition& t : wiggled) {
      for (int d = 0; d < 4; ++d) t.point.belief(d) += rng.normal(0.0, 1e-4);
      t.reward += rng.normal(0.0, 1e-3);
    }
    episodes.push_back(wiggled);
  }
  for (const EpisodeTransitions& ep : episodes) {
    exact.gptd_update(ep);
    sparse.gptd_update(ep);
  }
  CHECK(sparse.dictionary_size() < exact.dictionary_size());
  for (const JointPoint& p : sparse.dictionary()) {
    PosteriorStat pe = exact.q_posterior_one(p.belief, p.action);
    PosteriorStat ps = sparse.q_posterior_one(p.belief, p.action);
    const double scale = std::max(1.0, std::abs(pe.mean));
    CHECK(std::abs(ps.mean - pe.mean) / scale < 0.05);
  }
}

TEST_CASE("sample_action") {
  SUBCASE("zero exploration is greedy with lowest-index ties") {
    GPQModel model = make_model();
    JointPoint x0{vec({1.0, 0.0, 0.0, 0.0}), 0};
    JointPoint x1{vec({1.0, 0.0, 0.0, 0.0}), 1};
    model.gptd_update({{x0, 2.0, 0.99, true}});
    model.gptd_update({{x1, 1.0, 0.99, true}});
    RandomSource rng(3);
    CHECK(model.sample_action(x0.belief, {0, 1, 2}, 0.0, rng) == 0);
    // Untrained model: all means zero, tie broken to the lowest id even when
    // listed out of order.
    GPQModel fresh = make_model();
    CHECK(fresh.sample_action(x0.belief, {2, 1, 0}, 0.0, rng) == 0);
  }
  SUBCASE("a single available action is always returned") {
    GPQModel model = make_model();
    RandomSource rng(4);
    Eigen::VectorXd b = vec({0.5, 0.5, 0.0, 0.0});
    for (int i = 0; i < 10; ++i) CHECK(model.sample_action(b, {2}, 1.0, rng) == 2);
  }
  SUBCASE("symmetric posteriors split draws about evenly") {
    GPQModel model = make_model();
    Eigen::VectorXd b = vec({1.0, 0.0, 0.0, 0.0});
    RandomSource rng(5);
    int first = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
      if (model.sample_action(b, {0, 1}, 1.0, rng) == 0) ++first;
    const double freq = static_cast<double>(first) / n;
    CHECK(freq == doctest::Approx(0.5).epsilon(0.04));
  }
}

TEST_CASE("posterior query contracts") {
  GPQModel model = make_model();
  Eigen::VectorXd b = vec({1.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(model.q_posterior(b, {}), std::invalid_argument);
  CHECK_THROWS_AS(model.q_posterior_one(vec({1.0}), 0), std::invalid_argument);
  CHECK_THROWS_AS(model.q_posterior_one(b, 17), std::invalid_argument);
  // Delta kernel, empty block for an action no data ever touched.
  JointPoint x{vec({1.0, 2.0, 0.0, 0.0}), 0};
  model.gptd_update({{x, 3.0, 0.99, true}});
  PosteriorStat p = model.q_posterior_one(b, 2);
  CHECK(p.mean == 0.0);
  CHECK(p.variance == doctest::Approx(1.0));
}

TEST_CASE("episodes must end in their single terminal transition") {
  GPQModel model = make_model();
  EpisodeTransitions ep;
  ep.push_back({{vec({1.0, 0.0, 0.0, 0.0}), 0}, -1.0, 0.99, false});
  CHECK_THROWS_AS(model.gptd_update(ep), std::invalid_argument);
  CHECK_THROWS_AS(model.gptd_update({}), std::invalid_argument);
}
