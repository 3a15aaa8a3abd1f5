#pragma once

#include "geiringer/recombination.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// Brute-force orbit over fully tagged populations, no quotients.
inline std::vector<std::vector<geiringer::Rollout>> full_orbit(const geiringer::Population& p0) {
  using geiringer::Rollout;
  const auto gens = geiringer::generator_index(p0);
  std::set<std::vector<std::tuple<std::string, std::vector<geiringer::TaggedState>, geiringer::TerminalLabel>>> seen;
  auto key = [](const std::vector<Rollout>& rs) {
    std::vector<std::tuple<std::string, std::vector<geiringer::TaggedState>, geiringer::TerminalLabel>> k;
    for (const auto& r : rs) k.emplace_back(r.action.name, r.states, r.terminal);
    return k;
  };
  std::vector<std::vector<Rollout>> members{p0.rollouts()};
  seen.insert(key(members.front()));
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (const auto& g : gens) {
      auto next = members[head];
      geiringer::apply_in_place(next, g);
      if (seen.insert(key(next)).second) members.push_back(std::move(next));
    }
  }
  return members;
}

inline geiringer::Rational mean_frequency(const std::vector<std::vector<geiringer::Rollout>>& members,
                                          const geiringer::Schema& h) {
  std::uint64_t hits = 0;
  for (const auto& m : members) hits += geiringer::schema_count(h, m);
  return geiringer::Rational(geiringer::BigInt(hits), geiringer::BigInt(members.size()) * members.front().size());
}

}  // namespace oracle
