#pragma once

#include "geiringer/core_model.hpp"

#include <atomic>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace geiringer {

struct SimConfig {
  std::uint32_t states = 6;
  std::uint32_t observations = 3;
  std::uint32_t actions = 2;
  std::uint32_t max_branching = 2;
  std::uint32_t depth_cap = 4;
  std::int64_t payoff_min = 0;
  std::int64_t payoff_max = 10;
  std::uint32_t rollouts = 8;
  std::uint64_t seed = 0;
  Rational cap_payoff = 0;

  bool operator==(const SimConfig&) const = default;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const SimConfig& cfg);

/// Per (state, action): successor distribution and termination probability.
struct Transition {
  std::vector<std::uint32_t> successors;
  std::vector<std::uint32_t> weights;  // positive, parallel to successors
  Rational terminate;                  // in (0, 1)

  bool operator==(const Transition&) const = default;
};

/// Toy partially observable environment. Hidden state 0 is the root; the
/// agent sees states 1..|S| only through `observation` (a ClassId per
/// state). States with equal observations expose identical action sets.
struct EnvModel {
  SimConfig config;
  std::vector<ActionLabel> action_alphabet;
  std::vector<ClassId> observation;                 // index = hidden state, [0] unused (root)
  std::vector<std::vector<std::size_t>> available;  // per observation class (index value-1)
  std::vector<std::size_t> root_actions;
  std::vector<std::vector<Transition>> transitions;  // [state][action index], empty if unavailable
  std::vector<std::pair<std::int64_t, std::int64_t>> payoff_range;  // per hidden state
  Rational cap_payoff = 0;

  const std::vector<std::size_t>& actions_at(std::uint32_t state) const;
  bool operator==(const EnvModel&) const = default;
};

/// Deterministic in cfg.seed; every observation class is non-empty and
/// every available (state, action) terminates with positive probability.
EnvModel make_random_pomdp(const SimConfig& cfg);

/// Globally unique tag and terminal names. Linearizable.
class TagAllocator {
 public:
  std::uint64_t next_tag() { return tags_++; }
  std::uint64_t next_terminal() { return terminals_++; }

 private:
  std::atomic<std::uint64_t> tags_{0};
  std::atomic<std::uint64_t> terminals_{0};
};

struct SimulatedRollout {
  Rollout rollout;
  std::vector<std::uint32_t> hidden;  // hidden state behind each recorded state
  Rational payoff;
  bool hit_cap = false;
};

/// One rollout from the root after `action`, policy uniform over available
/// actions. A rollout reaching the depth cap ends in a "cap<n>" terminal
/// paying the configured cap payoff.
SimulatedRollout simulate_rollout(const EnvModel& env, const ActionLabel& action, std::mt19937_64& rng,
                                  TagAllocator& tags);

struct GeneratedPopulation {
  Population population;
  PayoffMap payoffs;
  std::vector<std::vector<std::uint32_t>> hidden;
  std::size_t cap_hits = 0;
};

/// One rollout per entry of the action sequence, in order. Rollout i uses
/// its own stream seeded from (seed, i).
GeneratedPopulation generate_population(const EnvModel& env, const std::vector<ActionLabel>& sequence,
                                        std::uint64_t seed);

/// Round-robin over the root actions, `count` entries.
std::vector<ActionLabel> default_action_sequence(const EnvModel& env, std::size_t count);

}  // namespace geiringer
