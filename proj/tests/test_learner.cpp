#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "patrol/baselines.hpp"
#include "patrol/error.hpp"
#include "patrol/learner.hpp"

using namespace patrol;

namespace {

PolicyParams random_params(Rng& rng, double scale) {
  PolicyParams p;
  for (auto& w : p.policy) w = scale * (2.0 * rng.uniform01() - 1.0);
  for (auto& w : p.value) w = scale * (2.0 * rng.uniform01() - 1.0);
  return p;
}

EnvConfig small_config(int agents, int horizon) {
  EnvConfig c;
  c.num_agents = agents;
  c.horizon = horizon;
  return c;
}

double mean_team_reward(const PatrolGraph& graph, const EnvConfig& config, const Policy& policy, int runs) {
  return evaluate(graph, config, policy, runs, 12345).mean_team_joint_reward;
}

}  // namespace

TEST_CASE("features on a crafted 3x3 instance") {
  const PatrolGraph graph = skeletonize(fixture::lattice(3, 3, {0, 4, 0, 0, 0, 0, 0, 0, 8}));
  EnvConfig config = small_config(1, 50);
  config.line_of_sight = 1;
  auto [state, obs] = reset(graph, config, 0);
  state.positions = {4};
  std::fill(state.visits.begin(), state.visits.end(), 0);
  state.visits[4] = 1;
  const FeatureVector f = featurize(graph, observe(graph, state, config, 0), 0, 0, config);

  CHECK(f.slot_nodes == std::array<NodeId, 5>{4, 1, 7, 3, 5});
  const auto& stay = f.slots[0];
  CHECK(stay.sigma == 0.0);
  CHECK(stay.unvisited == 0.0);
  CHECK(stay.progress == 0.0);
  const auto& up = f.slots[1];
  CHECK(up.sigma == 0.5);
  CHECK(up.discounted == 0.5);
  CHECK(up.unvisited == 1.0);
  CHECK(up.progress == -1.0);
  CHECK(f.slots[2].progress == 1.0);
  CHECK(f.slots[3].progress == -1.0);
  CHECK(f.slots[4].progress == 1.0);
  // the frontier target is also node 8 here: everything is in sight
  for (const auto& s : f.slots) CHECK(s.frontier == s.progress);
  for (const auto& s : f.slots) {
    CHECK(s.present == 1.0);
    CHECK(s.monitored == 1.0);
    CHECK(s.crowding == 0.0);
  }
  CHECK(f.frac_unvisited == 8.0 / 9.0);
  CHECK(f.nearest_agent == 1.0);
  CHECK(f.nearest_target == 1.0 / 3.0);
  CHECK(f.remaining == 1.0);
  CHECK(f.flat().size() == FeatureVector::kLength);
}

TEST_CASE("features pad absent slots and keep a fixed length") {
  const PatrolGraph graph = skeletonize(fixture::from_rows({"#.#"}));
  EnvConfig config = small_config(2, 10);
  auto [state, obs] = reset(graph, config, 0);
  const FeatureVector f = featurize(graph, obs[0], 0, 0, config);
  for (int k = 1; k < kNumSlots; ++k) {
    CHECK(f.slot_nodes[static_cast<std::size_t>(k)] == -1);
    CHECK(f.slots[static_cast<std::size_t>(k)].present == 0.0);
  }
  const auto rows = action_features(f);
  for (int k = 1; k < kNumSlots; ++k) {
    for (double x : rows[static_cast<std::size_t>(k)]) CHECK(x == 0.0);
  }
  const FeatureVector late = featurize(graph, obs[1], 1, 5, config);
  CHECK(late.remaining == 0.5);
  CHECK(late.flat().size() == f.flat().size());
}

TEST_CASE("masking puts exactly zero mass on illegal slots") {
  SyntheticSpec spec;
  spec.rows = spec.cols = 8;
  spec.hotspots = 1;
  spec.road_density = 0.6;
  const PatrolGraph graph = skeletonize(generate_synthetic_map(spec, 2));
  Rng rng(8);
  LearnerConfig lc;
  for (int trial = 0; trial < 10; ++trial) {
    const PolicyParams params = random_params(rng, 3.0);
    const EpisodeBatch ep = collect_episode(graph, small_config(2, 20), lc, params, rng());
    for (const AgentSample& s : ep.batch.samples) {
      const auto d = action_distribution(params, s.features, s.legal);
      double total = 0.0;
      for (int k = 0; k < kNumSlots; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        if (!s.legal[uk]) {
          CHECK(d.probs[uk] == 0.0);
          CHECK(std::isinf(d.log_probs[uk]));
        }
        total += d.probs[uk];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.legal[static_cast<std::size_t>(s.slot)] == 1);
    }
  }
  LegalMask none{};
  ActionFeatures zeros{};
  CHECK_THROWS_AS(action_distribution(PolicyParams{}, zeros, none), Error);
}

TEST_CASE("untrained policy is uniform over legal slots") {
  ActionFeatures rows{};
  const LegalMask legal{1, 0, 1, 1, 0};
  const auto d = action_distribution(PolicyParams{}, rows, legal);
  for (int k : {0, 2, 3}) CHECK(d.probs[static_cast<std::size_t>(k)] == doctest::Approx(1.0 / 3.0));
  CHECK(d.argmax() == 0);
}

TEST_CASE("joint value is the sum of per-agent values") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const PolicyParams params = random_params(rng, 2.0);
    std::vector<ValueFeatures> agents(1 + rng.uniform_index(6));
    for (auto& g : agents) {
      for (auto& x : g) x = rng.uniform01();
    }
    double sum = 0.0;
    for (const auto& g : agents) sum += agent_value(params, g);
    CHECK(joint_value(params, agents) == sum);
    double direct = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < kValueFeatures; ++j) v += params.value[j] * agents[i][j];
      direct += v;
    }
    CHECK(joint_value(params, agents) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("GAE limits on a 3-step trajectory") {
  const std::vector<double> r{1.0, -2.0, 0.5};
  const std::vector<double> v{0.3, -0.1, 0.7, 0.0};
  const double g = 0.9;
  const auto td = gae_advantages(r, v, g, 0.0);
  for (std::size_t t = 0; t < 3; ++t) CHECK(td[t] == doctest::Approx(r[t] + g * v[t + 1] - v[t]).epsilon(1e-14));
  const auto mc = gae_advantages(r, v, g, 1.0);
  for (std::size_t t = 0; t < 3; ++t) {
    double ret = 0.0, disc = 1.0;
    for (std::size_t k = t; k < 3; ++k, disc *= g) ret += disc * r[k];
    ret += disc * v[3];
    CHECK(mc[t] == doctest::Approx(ret - v[t]).epsilon(1e-14));
  }
  // general lambda against the explicit weighted sum of TD errors
  const double lam = 0.7;
  const auto mid = gae_advantages(r, v, g, lam);
  for (std::size_t t = 0; t < 3; ++t) {
    double a = 0.0, w = 1.0;
    for (std::size_t k = t; k < 3; ++k, w *= g * lam) a += w * (r[k] + g * v[k + 1] - v[k]);
    CHECK(mid[t] == doctest::Approx(a).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gae_advantages(r, std::vector<double>{0.0}, g, lam), Error);
}

TEST_CASE("surrogate gradient matches central differences") {
  SyntheticSpec spec;
  spec.rows = spec.cols = 7;
  spec.hotspots = 1;
  const PatrolGraph graph = skeletonize(generate_synthetic_map(spec, 5));
  Rng rng(99);
  LearnerConfig lc;
  for (int draw = 0; draw < 10; ++draw) {
    const PolicyParams old_params = random_params(rng, 1.0);
    EpisodeBatch ep = collect_episode(graph, small_config(2, 12), lc, old_params, rng());
    compute_advantages(ep.batch, old_params, lc);
    PolicyParams params = old_params;
    for (auto& w : params.policy) w += 0.3 * (2.0 * rng.uniform01() - 1.0);
    for (auto& w : params.value) w += 0.3 * (2.0 * rng.uniform01() - 1.0);
    std::vector<std::size_t> idx(ep.batch.samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});

    PolicyParams grad;
    surrogate_objective(params, ep.batch, idx, lc, &grad);
    const auto analytic = grad.flat();
    const auto theta = params.flat();
    const double h = 1e-6;
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      const double fp = surrogate_objective(PolicyParams::from_flat(plus), ep.batch, idx, lc, nullptr);
      const double fm = surrogate_objective(PolicyParams::from_flat(minus), ep.batch, idx, lc, nullptr);
      const double numeric = (fp - fm) / (2.0 * h);
      diff += (analytic[i] - numeric) * (analytic[i] - numeric);
      norm += numeric * numeric;
    }
    CHECK(std::sqrt(diff) <= 1e-4 * std::max(1.0, std::sqrt(norm)));
  }
}

TEST_CASE("training is reproducible and zero updates return the initial params") {
  SyntheticSpec spec;
  spec.rows = spec.cols = 6;
  spec.hotspots = 1;
  spec.decay_radius = 2;
  const PatrolGraph graph = skeletonize(generate_synthetic_map(spec, 1));
  LearnerConfig lc;
  lc.total_updates = 0;
  const TrainResult none = train(graph, small_config(1, 20), lc);
  CHECK(none.curve.empty());
  CHECK(none.params == PolicyParams{});

  lc.total_updates = 5;
  lc.seed = 3;
  const TrainResult a = train(graph, small_config(2, 20), lc);
  const TrainResult b = train(graph, small_config(2, 20), lc);
  lc.jobs = 3;
  const TrainResult c = train(graph, small_config(2, 20), lc);
  CHECK(a.curve.size() == 5);
  CHECK(a.curve == b.curve);
  CHECK(a.params == b.params);
  CHECK(a.curve == c.curve);
  CHECK(a.params == c.params);
  lc.learning_rate = -1.0;
  CHECK_THROWS_AS(train(graph, small_config(2, 20), lc), Error);
}

TEST_CASE("trained policy beats random on small maps") {
  SyntheticSpec spec;
  spec.rows = spec.cols = 5;
  spec.hotspots = 1;
  spec.decay_radius = 1;
  const PatrolGraph tiny = skeletonize(generate_synthetic_map(spec, 1));
  EnvConfig one = small_config(1, 50);
  const TrainResult trained = train(tiny, one, LearnerConfig{});
  const double learned = mean_team_reward(tiny, one, LearnedPolicy(trained.params), 100);
  const double random = mean_team_reward(tiny, one, RandomPolicy(), 100);
    CHECK(learned >= 2.0 * random);
  CHECK(learned > random);

  spec.rows = spec.cols = 10;
  spec.decay_radius = 4;
  const PatrolGraph ten = skeletonize(generate_synthetic_map(spec, 3));
  LearnerConfig lc;
  lc.total_updates = 200;
  const TrainResult t10 = train(ten, one, lc);
  CHECK(t10.curve.back() > mean_team_reward(ten, one, RandomPolicy(), 100));
}

TEST_CASE("two hotspots are both covered by a trained pair") {
  // Monitored corridor of 4 cells with a hotspot at each end, so the top 50%
  // is exactly the two hotspots.
  const PatrolGraph graph = skeletonize(fixture::from_rows({"aaaaaa", "a####a", "aaaaaa"}, {0, 0, 0, 0, 0, 0,    //
                                                                                          0, 40, 0, 0, 30, 0,  //
                                                                                          0, 0, 0, 0, 0, 0}));
  const EnvConfig config = small_config(2, 50);
  const TrainResult trained = train(graph, config, LearnerConfig{});
  const std::vector<double> psi{50.0};
  const Evaluation ev = evaluate_policy(graph, config, trained.params, 20, 1, true, psi);
  CHECK(ev.report.coverage_at(50) == 1.0);
}

TEST_CASE("evaluation selection modes") {
  SyntheticSpec spec;
  spec.rows = spec.cols = 6;
  spec.hotspots = 1;
  spec.decay_radius = 2;
  const PatrolGraph graph = skeletonize(generate_synthetic_map(spec, 2));
  EnvConfig config = small_config(2, 15);
  config.start_mode = StartMode::kBest;
  Rng rng(1);
  const PolicyParams params = random_params(rng, 1.0);
  const auto argmax = evaluate_policy(graph, config, params, 5, 0, false);
  CHECK(argmax.report.entropy == 0.0);
  const auto one = evaluate_policy(graph, config, params, 1, 0, true);
  CHECK(one.report.entropy == 0.0);
  const auto sampled = evaluate_policy(graph, config, PolicyParams{}, 20, 0, true);
  for (double c : sampled.report.coverage) CHECK((c >= 0.0 && c <= 1.0));
  CHECK(evaluate_policy(graph, config, params, 6, 0, true, kDefaultPsi, false, 3).episodes ==
        evaluate_policy(graph, config, params, 6, 0, true, kDefaultPsi, false, 1).episodes);
}

TEST_CASE("policy files") {
  Rng rng(6);
  const PolicyParams params = random_params(rng, 1.0);
  CHECK(parse_params(serialize_params(params)) == params);
  std::string text = serialize_params(params);
  const auto pos = text.find(feature_schema_hash());
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 4, "ffff");
  try {
    parse_params(text);
    FAIL("expected SchemaMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchemaMismatch);
  }
  CHECK(serialize_curve(std::vector<double>{1.0, 2.5}) == "update,mean_joint_reward\n0,1.000000\n1,2.500000\n");
}
