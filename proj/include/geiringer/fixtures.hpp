#pragma once

#include "geiringer/core_model.hpp"

#include <random>

namespace geiringer::fixtures {

/// Homologous, b = 3:
///   (alpha,(1,a),(2,a),f1) (alpha,(1,b),(2,b),f2) (beta,(1,c),(2,c),f3)
Population population_a();

/// Non-homologous, b = 2: (alpha,(1,a),(2,a),f1) (beta,(2,b),(1,b),f2)
Population population_b();

struct RandomPopulationParams {
  std::size_t max_rollouts = 4;
  std::size_t max_height = 3;
  std::uint32_t max_classes = 4;
  std::size_t actions = 2;
  bool homologous = false;
  bool allow_stateless = true;
};

/// Random valid population: tags are "a", "b", ... per class, terminals f1..fb.
/// With `homologous`, each class is pinned to one position.
Population random_population(std::mt19937_64& rng, const RandomPopulationParams& params);

}  // namespace geiringer::fixtures
