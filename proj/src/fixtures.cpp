#include "geiringer/fixtures.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace geiringer::fixtures {

namespace {

constexpr std::array<const char*, 4> kActions{"alpha", "beta", "gamma", "delta"};

Rollout rollout(const char* action, std::vector<std::pair<std::uint32_t, const char*>> states, const char* terminal) {
  Rollout r{{action}, {}, {terminal, 0}};
  for (auto [cls, tag] : states) r.states.push_back({ClassId{cls}, {tag, 0}});
  return r;
}

std::string tag_symbol(std::size_t k) {
  return k < 26 ? std::string(1, static_cast<char>('a' + k)) : "t" + std::to_string(k);
}

}  // namespace

Population population_a() {
  return make_population({
      rollout("alpha", {{1, "a"}, {2, "a"}}, "f1"),
      rollout("alpha", {{1, "b"}, {2, "b"}}, "f2"),
      rollout("beta", {{1, "c"}, {2, "c"}}, "f3"),
  });
}

Population population_b() {
  return make_population({
      rollout("alpha", {{1, "a"}, {2, "a"}}, "f1"),
      rollout("beta", {{2, "b"}, {1, "b"}}, "f2"),
  });
}

Population random_population(std::mt19937_64& rng, const RandomPopulationParams& params) {
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  const std::size_t b = pick(1, params.max_rollouts);

  // Homologous populations pin each class to a position.
  std::vector<std::vector<std::uint32_t>> by_position(params.max_height);
  if (params.homologous) {
    for (std::uint32_t c = 1; c <= params.max_classes; ++c) {
      by_position[pick(0, params.max_height - 1)].push_back(c);
    }
  }

  std::map<std::uint32_t, std::size_t> next_tag;
  std::vector<Rollout> rollouts;
  for (std::size_t i = 0; i < b; ++i) {
    Rollout r;
    r.action = {kActions[pick(0, std::min(params.actions, kActions.size()) - 1)]};
    const std::size_t height = pick(params.allow_stateless ? 0 : 1, params.max_height);
    for (std::size_t k = 0; k < height; ++k) {
      std::uint32_t cls = 0;
      if (params.homologous) {
        const auto& pool = by_position[k];
        if (pool.empty()) break;
        cls = pool[pick(0, pool.size() - 1)];
      } else {
        cls = static_cast<std::uint32_t>(pick(1, params.max_classes));
      }
      r.states.push_back({ClassId{cls}, {tag_symbol(next_tag[cls]++), 0}});
    }
    r.terminal = {"f" + std::to_string(i + 1), 0};
    rollouts.push_back(std::move(r));
  }
  return make_population(std::move(rollouts));
}

}  // namespace geiringer::fixtures
