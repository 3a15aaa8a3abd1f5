#include "geiringer/envsim.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace geiringer {

namespace {

constexpr std::array<const char*, 8> kGreek{"alpha", "beta", "gamma", "delta", "xi", "pi", "rho", "sigma"};

std::string action_name(std::size_t k) {
  return k < kGreek.size() ? std::string(kGreek[k]) : "a" + std::to_string(k);
}

template <class Rng>
std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

template <class Rng>
bool bernoulli(Rng& rng, const Rational& p) {
  const BigInt num = boost::multiprecision::numerator(p);
  const BigInt den = boost::multiprecision::denominator(p);
  return BigInt(uniform(rng, 0, den.convert_to<std::uint64_t>() - 1)) < num;
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.states == 0 || cfg.observations == 0 || cfg.actions == 0 || cfg.max_branching == 0 ||
      cfg.depth_cap == 0 || cfg.rollouts == 0) {
    throw InvalidConfig("all counts must be positive");
  }
  if (cfg.observations > cfg.states) throw InvalidConfig("more observations than states");
  if (cfg.payoff_min > cfg.payoff_max) throw InvalidConfig("empty payoff range");
}

const std::vector<std::size_t>& EnvModel::actions_at(std::uint32_t state) const {
  if (state == 0) return root_actions;
  return available.at(observation.at(state).value - 1);
}

EnvModel make_random_pomdp(const SimConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  EnvModel env;
  env.config = cfg;
  env.cap_payoff = cfg.cap_payoff;
  for (std::size_t k = 0; k < cfg.actions; ++k) env.action_alphabet.push_back({action_name(k)});

  // Classes 1..|O| each get one state first, the rest are spread at random.
  std::vector<std::uint32_t> classes(cfg.states);
  for (std::uint32_t s = 0; s < cfg.states; ++s) {
    classes[s] = s < cfg.observations ? s + 1 : static_cast<std::uint32_t>(uniform(rng, 1, cfg.observations));
  }
  std::shuffle(classes.begin(), classes.end(), rng);
  env.observation.push_back(ClassId{});
  for (auto c : classes) env.observation.push_back(ClassId{c});

  env.available.resize(cfg.observations);
  for (auto& acts : env.available) {
    for (std::size_t k = 0; k < cfg.actions; ++k) {
      if (uniform(rng, 0, 1) == 1) acts.push_back(k);
    }
    if (acts.empty()) acts.push_back(uniform(rng, 0, cfg.actions - 1));
  }
  env.root_actions.resize(cfg.actions);
  std::iota(env.root_actions.begin(), env.root_actions.end(), std::size_t{0});

  std::vector<std::uint32_t> all_states(cfg.states);
  std::iota(all_states.begin(), all_states.end(), 1u);
  env.transitions.resize(cfg.states + 1);
  env.payoff_range.resize(cfg.states + 1);
  for (std::uint32_t s = 0; s <= cfg.states; ++s) {
    env.transitions[s].resize(cfg.actions);
    for (std::size_t a : env.actions_at(s)) {
      Transition& tr = env.transitions[s][a];
      const auto k = static_cast<std::size_t>(uniform(rng, 1, std::min(cfg.max_branching, cfg.states)));
      std::vector<std::uint32_t> pool = all_states;
      std::shuffle(pool.begin(), pool.end(), rng);
      tr.successors.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(tr.successors.begin(), tr.successors.end());
      for (std::size_t i = 0; i < k; ++i) tr.weights.push_back(static_cast<std::uint32_t>(uniform(rng, 1, 9)));
      tr.terminate = Rational(static_cast<int>(uniform(rng, 1, 3)), 4);
    }
    const auto lo = static_cast<std::int64_t>(uniform(rng, 0, static_cast<std::uint64_t>(cfg.payoff_max - cfg.payoff_min)));
    const auto hi = static_cast<std::int64_t>(uniform(rng, static_cast<std::uint64_t>(lo),
                                                      static_cast<std::uint64_t>(cfg.payoff_max - cfg.payoff_min)));
    env.payoff_range[s] = {cfg.payoff_min + lo, cfg.payoff_min + hi};
  }
  return env;
}

SimulatedRollout simulate_rollout(const EnvModel& env, const ActionLabel& action, std::mt19937_64& rng,
                                  TagAllocator& tags) {
  const auto found = std::find(env.action_alphabet.begin(), env.action_alphabet.end(), action);
  if (found == env.action_alphabet.end()) throw std::invalid_argument("unknown action '" + action.name + "'");
  std::size_t a = static_cast<std::size_t>(found - env.action_alphabet.begin());
  const auto& root = env.actions_at(0);
  if (std::find(root.begin(), root.end(), a) == root.end()) {
    throw std::invalid_argument("action '" + action.name + "' unavailable at the root");
  }

  SimulatedRollout out;
  out.rollout.action = action;
  std::uint32_t state = 0;
  while (true) {
    const Transition& tr = env.transitions[state][a];
    if (bernoulli(rng, tr.terminate)) {
      const auto [lo, hi] = env.payoff_range[state];
      out.rollout.terminal = {"f" + std::to_string(tags.next_terminal()), 0};
      out.payoff = Rational(lo + static_cast<std::int64_t>(uniform(rng, 0, static_cast<std::uint64_t>(hi - lo))));
      return out;
    }
    if (out.rollout.states.size() == env.config.depth_cap) {
      out.rollout.terminal = {"cap" + std::to_string(tags.next_terminal()), 0};
      out.payoff = env.cap_payoff;
      out.hit_cap = true;
      return out;
    }
    std::discrete_distribution<std::size_t> pick(tr.weights.begin(), tr.weights.end());
    state = tr.successors[pick(rng)];
    out.rollout.states.push_back({env.observation[state], {"t" + std::to_string(tags.next_tag()), 0}});
    out.hidden.push_back(state);
    const auto& acts = env.actions_at(state);
    a = acts[uniform(rng, 0, acts.size() - 1)];
  }
}

GeneratedPopulation generate_population(const EnvModel& env, const std::vector<ActionLabel>& sequence,
                                        std::uint64_t seed) {
  TagAllocator tags;
  std::vector<Rollout> rollouts;
  PayoffMap payoffs;
  std::vector<std::vector<std::uint32_t>> hidden;
  std::size_t cap_hits = 0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    SimulatedRollout sim = simulate_rollout(env, sequence[i], rng, tags);
    payoffs.set(sim.rollout.terminal, sim.payoff);
    cap_hits += sim.hit_cap ? 1 : 0;
    hidden.push_back(std::move(sim.hidden));
    rollouts.push_back(std::move(sim.rollout));
  }
  return {make_population(std::move(rollouts)), std::move(payoffs), std::move(hidden), cap_hits};
}

std::vector<ActionLabel> default_action_sequence(const EnvModel& env, std::size_t count) {
  std::vector<ActionLabel> out;
  const auto& root = env.actions_at(0);
  for (std::size_t i = 0; i < count; ++i) out.push_back(env.action_alphabet[root[i % root.size()]]);
  return out;
}

}  // namespace geiringer
