#include "patrol/learner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "patrol/error.hpp"
#include "patrol/kernels.hpp"

namespace patrol {

void LearnerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  if (!(entropy_coeff >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "entropy_coeff must be non-negative");
  if (!(kl_coeff >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "kl_coeff must be non-negative");
  if (!(clip_epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "clip_epsilon must be positive");
  if (!(discount > 0.0 && discount <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "discount must lie in (0, 1]");
  if (episodes_per_update < 1) throw Error(ErrorCode::kInvalidArgument, "episodes_per_update must be >= 1");
  if (total_updates < 0) throw Error(ErrorCode::kInvalidArgument, "total_updates must be >= 0");
  if (epochs < 1 || minibatch_size < 1) throw Error(ErrorCode::kInvalidArgument, "epochs and minibatch_size must be >= 1");
  if (!(value_coeff >= 0.0) || !(reward_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "value_coeff must be >= 0 and reward_scale > 0");
  }
  if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "jobs must be >= 1");
}

std::vector<double> PolicyParams::flat() const {
  std::vector<double> out(policy);
  out.insert(out.end(), value.begin(), value.end());
  return out;
}

PolicyParams PolicyParams::from_flat(std::span<const double> flat) {
  if (flat.size() != kActionFeatures + kValueFeatures) {
    throw Error(ErrorCode::kInvalidArgument, "parameter vector has the wrong length");
  }
  PolicyParams p;
  std::copy_n(flat.begin(), kActionFeatures, p.policy.begin());
  std::copy(flat.begin() + kActionFeatures, flat.end(), p.value.begin());
  return p;
}

int ActionDistribution::argmax() const {
  int best = -1;
  for (int k = 0; k < kNumSlots; ++k) {
    if (!legal[static_cast<std::size_t>(k)]) continue;
    if (best < 0 || probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

ActionDistribution action_distribution(const PolicyParams& params, const ActionFeatures& features,
                                       const LegalMask& legal) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  ActionDistribution d;
  d.legal = legal;
  double zmax = kNegInf;
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    if (!legal[k]) {
      d.logits[k] = kNegInf;
      continue;
    }
    d.logits[k] = kernels::dot(params.policy, features[k]);
    zmax = std::max(zmax, d.logits[k]);
  }
  if (zmax == kNegInf) throw Error(ErrorCode::kInvalidArgument, "no legal action");
  double total = 0.0;
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    if (legal[k]) total += std::exp(d.logits[k] - zmax);
  }
  const double lse = zmax + std::log(total);
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    if (!legal[k]) {
      d.log_probs[k] = kNegInf;
      d.probs[k] = 0.0;
      continue;
    }
    d.log_probs[k] = d.logits[k] - lse;
    d.probs[k] = std::exp(d.log_probs[k]);
  }
  return d;
}

double agent_value(const PolicyParams& params, const ValueFeatures& features) {
  return kernels::dot(params.value, features);
}

double joint_value(const PolicyParams& params, std::span<const ValueFeatures> agents) {
  double total = 0.0;
  for (const auto& g : agents) total += agent_value(params, g);
  return total;
}

std::vector<double> gae_advantages(std::span<const double> rewards, std::span<const double> values, double gamma,
                                   double lambda) {
  if (values.size() != rewards.size() + 1) {
    throw Error(ErrorCode::kInvalidArgument, "values must have one more entry than rewards");
  }
  std::vector<double> adv(rewards.size());
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    const double delta = rewards[i] + gamma * values[i + 1] - values[i];
    running = delta + gamma * lambda * running;
    adv[i] = running;
  }
  return adv;
}

double surrogate_objective(const PolicyParams& params, const Batch& batch, std::span<const std::size_t> indices,
                           const LearnerConfig& config, PolicyParams* grad) {
  if (grad != nullptr) {
    std::fill(grad->policy.begin(), grad->policy.end(), 0.0);
    std::fill(grad->value.begin(), grad->value.end(), 0.0);
  }
  if (indices.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(indices.size());
  const double eps = config.clip_epsilon;
  double objective = 0.0;
  std::array<double, kNumSlots> dz{};
  std::vector<double> value_dir(kValueFeatures);

  for (std::size_t idx : indices) {
    const AgentSample& s = batch.samples[idx];
    const auto d = action_distribution(params, s.features, s.legal);
    const auto a = static_cast<std::size_t>(s.slot);
    const double ratio = std::exp(d.log_probs[a] - s.old_log_prob);
    const double adv = s.advantage;
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    const double surrogate = std::min(ratio * adv, clipped * adv);

    double entropy = 0.0;
    double kl = 0.0;
    for (std::size_t k = 0; k < kNumSlots; ++k) {
      if (!s.legal[k]) continue;
      entropy -= d.probs[k] * d.log_probs[k];
      if (s.old_probs[k] > 0.0) kl += s.old_probs[k] * (std::log(s.old_probs[k]) - d.log_probs[k]);
    }

    const StepSample& step = batch.steps[s.step];
    const double v = joint_value(params, step.agents);
    const double verr = v - step.value_target;

    objective += surrogate + config.entropy_coeff * entropy - config.kl_coeff * kl - config.value_coeff * verr * verr;

    if (grad == nullptr) continue;
    // d/dz_k of the per-sample objective.
    const bool unclipped = (adv > 0.0 && ratio <= 1.0 + eps) || (adv < 0.0 && ratio >= 1.0 - eps);
    const double surr_coeff = unclipped ? adv * ratio : 0.0;
    for (std::size_t k = 0; k < kNumSlots; ++k) {
      if (!s.legal[k]) {
        dz[k] = 0.0;
        continue;
      }
      const double p = d.probs[k];
      const double dlogp = (k == a ? 1.0 : 0.0) - p;
      const double dentropy = -p * (d.log_probs[k] + entropy);
      const double dkl = p - s.old_probs[k];
      dz[k] = surr_coeff * dlogp + config.entropy_coeff * dentropy - config.kl_coeff * dkl;
    }
    for (std::size_t k = 0; k < kNumSlots; ++k) {
      if (dz[k] != 0.0) kernels::axpy(scale * dz[k], s.features[k], grad->policy);
    }
    const double vcoef = -2.0 * config.value_coeff * verr * scale;
    for (const auto& g : step.agents) kernels::axpy(vcoef, g, grad->value);
  }
  return objective * scale;
}

namespace {

LegalMask legal_mask(const PatrolGraph& graph, NodeId here, std::span<const Action> legal,
                     std::array<Action, kNumSlots>& by_slot) {
  LegalMask mask{};
  for (const Action& a : legal) {
    const auto k = static_cast<std::size_t>(slot_of(graph, here, a.destination(here)));
    mask[k] = 1;
    by_slot[k] = a;
  }
  return mask;
}

int sample_slot(const ActionDistribution& d, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  int last = -1;
  for (int k = 0; k < kNumSlots; ++k) {
    if (!d.legal[static_cast<std::size_t>(k)]) continue;
    cumulative += d.probs[static_cast<std::size_t>(k)];
    last = k;
    if (u < cumulative) return k;
  }
  return last;
}

// Runs fn(i) for i in [0, n) over `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(jobs, static_cast<int>(n))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool all_finite(const PolicyParams& p) {
  const auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(p.policy.begin(), p.policy.end(), finite) && std::all_of(p.value.begin(), p.value.end(), finite);
}

struct Adam {
  std::vector<double> m, v;
  long long t = 0;
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  // Ascent step on `params` along `grad`.
  void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] += lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
    }
  }
};

}  // namespace

EpisodeBatch collect_episode(const PatrolGraph& graph, const EnvConfig& env_config, const LearnerConfig& config,
                             const PolicyParams& params, std::uint64_t seed) {
  auto [state, observations] = reset(graph, env_config, seed);
  Rng rng(derive_seed(seed, 1));
  const auto n = static_cast<std::size_t>(env_config.num_agents);

  EpisodeBatch out;
  out.log.seed = seed;
  out.log.config_hash = config_hash(env_config);
  out.log.num_nodes = graph.size();
  out.log.horizon = env_config.horizon;
  out.log.routes.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.log.routes[i].push_back(state.positions[i]);
  out.batch.samples.reserve(n * static_cast<std::size_t>(env_config.horizon));
  out.batch.steps.reserve(static_cast<std::size_t>(env_config.horizon));

  JointAction actions(n);
  std::array<Action, kNumSlots> by_slot{};
  while (state.t < env_config.horizon) {
    StepSample step;
    step.agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto f = featurize(graph, observations[i], static_cast<int>(i), state.t, env_config);
      const auto legal = legal_actions(graph, state, static_cast<int>(i));
      AgentSample sample;
      sample.features = action_features(f);
      sample.legal = legal_mask(graph, state.positions[i], legal, by_slot);
      const auto d = action_distribution(params, sample.features, sample.legal);
      sample.slot = sample_slot(d, rng);
      sample.old_log_prob = d.log_probs[static_cast<std::size_t>(sample.slot)];
      sample.old_probs = d.probs;
      sample.step = out.batch.steps.size();
      actions[i] = by_slot[static_cast<std::size_t>(sample.slot)];
      out.batch.samples.push_back(sample);
      step.agents.push_back(value_features(f));
    }
    StepResult result = patrol::step(graph, state, env_config, actions);
    double team = 0.0;
    for (double r : result.joint_rewards) team += r;
    out.team_joint_reward += team;
    step.reward = team * config.reward_scale;
    out.batch.steps.push_back(std::move(step));
    for (std::size_t i = 0; i < n; ++i) out.log.routes[i].push_back(state.positions[i]);
    observations = std::move(result.observations);
  }
  return out;
}

void compute_advantages(Batch& batch, const PolicyParams& params, const LearnerConfig& config) {
  const std::size_t steps = batch.steps.size();
  std::vector<double> rewards(steps);
  std::vector<double> values(steps + 1, 0.0);  // terminal bootstrap stays 0
  for (std::size_t t = 0; t < steps; ++t) {
    rewards[t] = batch.steps[t].reward;
    values[t] = joint_value(params, batch.steps[t].agents);
  }
  const double lambda = config.use_gae ? config.gae_lambda : 1.0;
  const auto adv = gae_advantages(rewards, values, config.discount, lambda);
  for (std::size_t t = 0; t < steps; ++t) batch.steps[t].value_target = adv[t] + values[t];
  for (auto& s : batch.samples) s.advantage = adv[s.step];
}

TrainResult train(const PatrolGraph& graph, const EnvConfig& env_config, const LearnerConfig& config,
                  const std::function<void(int, double)>& on_update) {
  env_config.validate();
  config.validate();
  TrainResult result;
  std::vector<double> theta = result.params.flat();
  Adam adam(theta.size());
  const auto episodes = static_cast<std::size_t>(config.episodes_per_update);

  for (int u = 0; u < config.total_updates; ++u) {
    const PolicyParams current = PolicyParams::from_flat(theta);
    std::vector<EpisodeBatch> collected(episodes);
    parallel_for(episodes, config.jobs, [&](std::size_t e) {
      const auto stream = static_cast<std::uint64_t>(u) * episodes + e;
      collected[e] = collect_episode(graph, env_config, config, current, derive_seed(config.seed, stream));
      compute_advantages(collected[e].batch, current, config);
    });

    Batch batch;
    double reward_sum = 0.0;
    for (auto& ep : collected) {
      reward_sum += ep.team_joint_reward;
      const std::size_t offset = batch.steps.size();
      for (auto& s : ep.batch.samples) {
        s.step += offset;
        batch.samples.push_back(s);
      }
      for (auto& st : ep.batch.steps) batch.steps.push_back(std::move(st));
    }
    const double mean_reward = reward_sum / static_cast<double>(episodes);
    if (!std::isfinite(mean_reward)) {
      throw Error(ErrorCode::kDivergedTraining, "mean reward is not finite at update " + std::to_string(u));
    }

    // Per-batch advantage normalisation.
    double mean = 0.0;
    for (const auto& s : batch.samples) mean += s.advantage;
    mean /= static_cast<double>(batch.samples.size());
    double var = 0.0;
    for (const auto& s : batch.samples) var += (s.advantage - mean) * (s.advantage - mean);
    const double stddev = std::sqrt(var / static_cast<double>(batch.samples.size()));
    for (auto& s : batch.samples) s.advantage = stddev > 1e-12 ? (s.advantage - mean) / stddev : s.advantage - mean;

    std::vector<std::size_t> order(batch.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(config.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(u)));
    PolicyParams grad;
    const auto mb = static_cast<std::size_t>(config.minibatch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng.uniform_index(i))]);
      }
      for (std::size_t start = 0; start < order.size(); start += mb) {
        const std::span<const std::size_t> idx(order.data() + start, std::min(mb, order.size() - start));
        surrogate_objective(PolicyParams::from_flat(theta), batch, idx, config, &grad);
        adam.step(theta, grad.flat(), config.learning_rate);
      }
    }
    if (!all_finite(PolicyParams::from_flat(theta))) {
      throw Error(ErrorCode::kDivergedTraining, "parameters became non-finite at update " + std::to_string(u));
    }
    result.curve.push_back(mean_reward);
    if (on_update) on_update(u, mean_reward);
  }
  result.params = PolicyParams::from_flat(theta);
  return result;
}

Action LearnedPolicy::act(const DecisionContext& ctx, Rng& rng) {
  const NodeId here = ctx.observation.agent_positions[static_cast<std::size_t>(ctx.agent)];
  const auto f = featurize(ctx.graph, ctx.observation, ctx.agent, ctx.t, ctx.config);
  std::array<Action, kNumSlots> by_slot{};
  const LegalMask mask = legal_mask(ctx.graph, here, ctx.legal, by_slot);
  const auto d = action_distribution(params_, action_features(f), mask);
  const int slot = sampled_ ? sample_slot(d, rng) : d.argmax();
  return by_slot[static_cast<std::size_t>(slot)];
}

std::vector<RolloutResult> run_batch(const PatrolGraph& graph, const EnvConfig& config, const Policy& prototype,
                                     int num_runs, std::uint64_t seed, int jobs) {
  if (num_runs < 1) throw Error(ErrorCode::kInvalidArgument, "num_runs must be >= 1");
  std::vector<RolloutResult> results(static_cast<std::size_t>(num_runs));
  parallel_for(results.size(), jobs, [&](std::size_t r) {
    auto policy = prototype.clone();
    results[r] = rollout(graph, config, *policy, derive_seed(seed, r));
  });
  return results;
}

Evaluation evaluate(const PatrolGraph& graph, const EnvConfig& config, const Policy& prototype, int num_runs,
                    std::uint64_t seed, std::span<const double> psi_values, bool pooled, int jobs) {
  auto runs = run_batch(graph, config, prototype, num_runs, seed, jobs);
  Evaluation out;
  double total = 0.0;
  for (auto& r : runs) {
    total += r.team_joint_total();
    out.episodes.push_back(std::move(r.log));
  }
  out.mean_team_joint_reward = total / static_cast<double>(runs.size());
  out.report = batch_evaluate(graph, out.episodes, psi_values, pooled);
  return out;
}

Evaluation evaluate_policy(const PatrolGraph& graph, const EnvConfig& config, const PolicyParams& params,
                           int num_runs, std::uint64_t seed, bool sampled, std::span<const double> psi_values,
                           bool pooled, int jobs) {
  const LearnedPolicy policy(params, sampled);
  return evaluate(graph, config, policy, num_runs, seed, psi_values, pooled, jobs);
}

}  // namespace patrol
