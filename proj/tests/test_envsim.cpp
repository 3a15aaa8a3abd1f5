#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geiringer/envsim.hpp"

#include <set>

using namespace geiringer;

namespace {

SimConfig small(std::uint64_t seed) {
  SimConfig cfg;
  cfg.states = 4;
  cfg.observations = 2;
  cfg.depth_cap = 2;
  cfg.rollouts = 4;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("the model is a function of the config") {
  CHECK(make_random_pomdp(small(11)) == make_random_pomdp(small(11)));
  CHECK_FALSE(make_random_pomdp(small(11)) == make_random_pomdp(small(12)));
}

TEST_CASE("invalid configs are rejected") {
  for (auto tweak : std::vector<void (*)(SimConfig&)>{
           [](SimConfig& c) { c.states = 0; },
           [](SimConfig& c) { c.observations = 0; },
           [](SimConfig& c) { c.actions = 0; },
           [](SimConfig& c) { c.max_branching = 0; },
           [](SimConfig& c) { c.depth_cap = 0; },
           [](SimConfig& c) { c.rollouts = 0; },
           [](SimConfig& c) { c.observations = c.states + 1; },
           [](SimConfig& c) { c.payoff_min = 5, c.payoff_max = 4; },
       }) {
    SimConfig cfg = small(1);
    tweak(cfg);
    CHECK_THROWS_AS(make_random_pomdp(cfg), InvalidConfig);
  }
}

TEST_CASE("model structure") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    SimConfig cfg = small(seed);
    cfg.states = 3 + seed % 5;
    cfg.observations = 1 + seed % 3;
    cfg.actions = 1 + seed % 4;
    cfg.max_branching = 1 + seed % 3;
    const EnvModel env = make_random_pomdp(cfg);
    std::set<std::uint32_t> used;
    for (std::uint32_t s = 1; s <= cfg.states; ++s) used.insert(env.observation[s].value);
    CHECK(used.size() == cfg.observations);
    CHECK(env.root_actions.size() == cfg.actions);
    for (std::uint32_t s = 0; s <= cfg.states; ++s) {
      CHECK_FALSE(env.actions_at(s).empty());
      for (std::size_t a : env.actions_at(s)) {
        const Transition& tr = env.transitions[s][a];
        CHECK(tr.terminate > 0);
        CHECK(tr.terminate < 1);
        CHECK(tr.successors.size() >= 1);
        CHECK(tr.successors.size() <= cfg.max_branching);
        CHECK(tr.weights.size() == tr.successors.size());
      }
      CHECK(env.payoff_range[s].first >= cfg.payoff_min);
      CHECK(env.payoff_range[s].second <= cfg.payoff_max);
    }
  }
}

TEST_CASE("generated populations are valid and reproducible") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    SimConfig cfg = small(seed);
    cfg.depth_cap = 1 + seed % 6;
    cfg.rollouts = 1 + seed % 9;
    const EnvModel env = make_random_pomdp(cfg);
    const auto sequence = default_action_sequence(env, cfg.rollouts);
    const GeneratedPopulation g = generate_population(env, sequence, seed * 7 + 1);
    REQUIRE(g.population.size() == cfg.rollouts);
    CHECK(std::holds_alternative<Population>(validate_population(g.population.rollouts())));
    std::size_t caps = 0;
    for (std::size_t i = 0; i < g.population.size(); ++i) {
      const Rollout& r = g.population[i];
      CHECK(r.action == sequence[i]);
      CHECK(r.states.size() <= cfg.depth_cap);
      CHECK(g.hidden[i].size() == r.states.size());
      for (std::size_t k = 0; k < r.states.size(); ++k) CHECK(r.states[k].cls == env.observation[g.hidden[i][k]]);
      CHECK(g.payoffs.find(r.terminal) != nullptr);
      caps += r.terminal.name.starts_with("cap") ? 1 : 0;
    }
    CHECK(caps == g.cap_hits);
    const GeneratedPopulation again = generate_population(env, sequence, seed * 7 + 1);
    CHECK(again.population == g.population);
    CHECK(again.payoffs == g.payoffs);
  }
}

TEST_CASE("depth cap 1 allows at most one state") {
  SimConfig cfg = small(3);
  cfg.depth_cap = 1;
  cfg.cap_payoff = Rational(-1, 2);
  const EnvModel env = make_random_pomdp(cfg);
  const GeneratedPopulation g = generate_population(env, default_action_sequence(env, 400), 5);
  bool capped = false;
  for (const auto& r : g.population.rollouts()) {
    CHECK(r.states.size() <= 1);
    if (r.terminal.name.starts_with("cap")) {
      capped = true;
      CHECK(r.states.size() == 1);
      CHECK(g.payoffs.at(r.terminal) == Rational(-1, 2));
    }
  }
  CHECK(capped);
}

TEST_CASE("the action sequence is followed in order") {
  SimConfig cfg = small(8);
  cfg.actions = 3;
  const EnvModel env = make_random_pomdp(cfg);
  CHECK(default_action_sequence(env, 5) ==
        std::vector<ActionLabel>{{"alpha"}, {"beta"}, {"gamma"}, {"alpha"}, {"beta"}});
  const std::vector<ActionLabel> sequence{{"gamma"}, {"gamma"}, {"alpha"}};
  const GeneratedPopulation g = generate_population(env, sequence, 1);
  for (std::size_t i = 0; i < sequence.size(); ++i) CHECK(g.population[i].action == sequence[i]);
  std::mt19937_64 rng(1);
  TagAllocator tags;
  CHECK_THROWS_AS(simulate_rollout(env, ActionLabel{"omega"}, rng, tags), std::invalid_argument);
}

TEST_CASE("a single state with branching 1 follows the only successor") {
  SimConfig cfg;
  cfg.states = 1;
  cfg.observations = 1;
  cfg.actions = 1;
  cfg.max_branching = 1;
  cfg.depth_cap = 50;
  cfg.seed = 4;
  const EnvModel env = make_random_pomdp(cfg);
  const GeneratedPopulation g = generate_population(env, default_action_sequence(env, 50), 9);
  for (const auto& r : g.population.rollouts()) {
    for (const auto& s : r.states) CHECK(s.cls == ClassId{1});
  }
  for (const auto& h : g.hidden) {
    for (auto s : h) CHECK(s == 1);
  }
}
