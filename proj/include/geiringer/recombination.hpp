#pragma once

#include "geiringer/core_model.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace geiringer {

enum class TransformKind { Identity, OnePoint, SingleSwap };

std::string to_string(TransformKind kind);

/// χ (OnePoint) or ν (SingleSwap) on the unordered tag pair {first, second}
/// of one class. The pair is stored sorted.
struct Transform {
  TransformKind kind = TransformKind::Identity;
  ClassId cls;
  StateTag first;
  StateTag second;

  static Transform identity() { return {}; }
  static Transform one_point(ClassId cls, StateTag c, StateTag d);
  static Transform single_swap(ClassId cls, StateTag c, StateTag d);

  bool operator==(const Transform&) const = default;
};

/// χ: when (cls,c) and (cls,d) sit in two distinct rollouts, exchange the
/// suffixes starting at those states (terminals travel with the suffix).
/// Same rollout or a missing state leaves p unchanged.
Population apply_chi(const Population& p, ClassId cls, const StateTag& c, const StateTag& d);

/// ν: exchange the two states in place, across rollouts or within one.
Population apply_nu(const Population& p, ClassId cls, const StateTag& c, const StateTag& d);

Population apply(const Population& p, const Transform& t);

/// In-place form used by the chain and the orbit search.
void apply_in_place(std::vector<Rollout>& rollouts, const Transform& t);

/// Identity first, then for every class and every unordered pair of its tags
/// one OnePoint and one SingleSwap transform, in (class, pair) order.
std::vector<Transform> generator_index(const Population& p);

/// μ: identity with probability ε, otherwise a uniformly chosen generator.
class TransformDistribution {
 public:
  static constexpr double kDefaultIdentityProbability = 0.01;

  TransformDistribution(const Population& p0, double identity_probability = kDefaultIdentityProbability);

  double identity_probability() const { return identity_probability_; }
  /// Non-identity generators; fixed for the lifetime of the distribution.
  const std::vector<Transform>& generators() const { return generators_; }

  template <class Rng>
  const Transform& sample(Rng& rng) const {
    if (generators_.empty() || std::bernoulli_distribution(identity_probability_)(rng)) return identity_;
    return generators_[std::uniform_int_distribution<std::size_t>(0, generators_.size() - 1)(rng)];
  }

 private:
  double identity_probability_;
  Transform identity_;
  std::vector<Transform> generators_;
};

/// The μ-driven Markov chain P^{t+1} = θ_t(P^t).
class RecombinationChain {
 public:
  RecombinationChain(const Population& p0, TransformDistribution mu, std::uint64_t seed);

  void step();
  const std::vector<Rollout>& current() const { return current_; }
  std::uint64_t time() const { return time_; }

 private:
  std::vector<Rollout> current_;
  TransformDistribution mu_;
  std::mt19937_64 rng_;
  std::uint64_t time_ = 0;
};

/// Running schema counts Σ_{t=0}^{T} 𝒳(h, P^t) of one chain run.
struct ChainTrace {
  Population initial;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  double identity_probability = 0;
  std::vector<Schema> schemata;
  std::vector<std::uint64_t> counts;

  /// b·(T+1), the number of rollouts seen over P^0..P^T.
  std::uint64_t rollouts_seen() const { return initial.size() * (steps + 1); }
  /// Φ_T(h_i) = counts[i] / (b·(T+1)).
  Rational phi(std::size_t i) const;
};

ChainTrace run_chain(const Population& p0, std::uint64_t steps, const TransformDistribution& mu,
                     std::vector<Schema> schemata, std::uint64_t seed);

class OrbitCapExceeded : public std::runtime_error {
 public:
  explicit OrbitCapExceeded(std::size_t cap);
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

/// Orbit of p0 under the group generated by all χ and ν transforms.
///
/// ν_{i,c,d} acts on every orbit member as the relabeling c <-> d of class i,
/// so the orbit is a union of free relabeling classes of equal size. Likewise
/// terminal copies sharing a base label and a preceding class in p0 can be
/// exchanged by a single χ. Members are therefore stored as canonical
/// representatives (tags and interchangeable terminals renamed in reading
/// order), and every exact orbit mean of a relabeling-invariant quantity such
/// as 𝒳(h,·) is the plain mean over representatives.
struct OrbitSet {
  Population initial;
  std::vector<Population> representatives;
  /// Full orbit size = representatives × multiplicity.
  BigInt multiplicity;
  BigInt size;
};

constexpr std::size_t kDefaultOrbitCap = 1'000'000;

/// Breadth-first closure of {p0}; the cap bounds the number of representatives.
OrbitSet enumerate_orbit(const Population& p0, std::size_t cap = kDefaultOrbitCap);

/// Exact mean of 𝒳(h,·)/b over the orbit.
Rational orbit_frequency(const OrbitSet& orbit, const Schema& h);

}  // namespace geiringer
