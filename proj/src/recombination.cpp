#include "geiringer/recombination.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>

namespace geiringer {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity: return "identity";
    case TransformKind::OnePoint: return "chi";
    case TransformKind::SingleSwap: return "nu";
  }
  return "unknown";
}

namespace {

Transform make_pair_transform(TransformKind kind, ClassId cls, StateTag c, StateTag d) {
  if (c == d) throw std::invalid_argument("crossover needs two distinct tags");
  if (d < c) std::swap(c, d);
  return {kind, cls, std::move(c), std::move(d)};
}

struct Site {
  std::size_t rollout;
  std::size_t position;
};

std::optional<Site> locate(const std::vector<Rollout>& rollouts, ClassId cls, const StateTag& tag) {
  for (std::size_t r = 0; r < rollouts.size(); ++r) {
    const auto& states = rollouts[r].states;
    for (std::size_t k = 0; k < states.size(); ++k) {
      if (states[k].cls == cls && states[k].tag == tag) return Site{r, k};
    }
  }
  return std::nullopt;
}

void chi_in_place(std::vector<Rollout>& rollouts, ClassId cls, const StateTag& c, const StateTag& d) {
  const auto x = locate(rollouts, cls, c);
  const auto y = locate(rollouts, cls, d);
  if (!x || !y || x->rollout == y->rollout) return;
  Rollout& r1 = rollouts[x->rollout];
  Rollout& r2 = rollouts[y->rollout];
  std::vector<TaggedState> tail1(r1.states.begin() + static_cast<std::ptrdiff_t>(x->position), r1.states.end());
  std::vector<TaggedState> tail2(r2.states.begin() + static_cast<std::ptrdiff_t>(y->position), r2.states.end());
  r1.states.resize(x->position);
  r2.states.resize(y->position);
  r1.states.insert(r1.states.end(), tail2.begin(), tail2.end());
  r2.states.insert(r2.states.end(), tail1.begin(), tail1.end());
  std::swap(r1.terminal, r2.terminal);
}

void nu_in_place(std::vector<Rollout>& rollouts, ClassId cls, const StateTag& c, const StateTag& d) {
  const auto x = locate(rollouts, cls, c);
  const auto y = locate(rollouts, cls, d);
  if (!x || !y) return;
  std::swap(rollouts[x->rollout].states[x->position], rollouts[y->rollout].states[y->position]);
}

BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

// Maps a population onto its canonical relabeling representative.
class Canonicalizer {
 public:
  explicit Canonicalizer(const Population& p0) {
    std::map<ClassId, std::set<StateTag>> tags;
    std::map<std::pair<std::string, ClassId>, std::set<TerminalLabel>> groups;
    for (const auto& r : p0.rollouts()) {
      for (const auto& s : r.states) tags[s.cls].insert(s.tag);
      if (!r.states.empty()) groups[{r.terminal.name, r.states.back().cls}].insert(r.terminal);
    }
    multiplicity_ = 1;
    for (auto& [cls, set] : tags) {
      class_index_[cls] = class_tags_.size();
      class_tags_.emplace_back(set.begin(), set.end());
      multiplicity_ *= factorial(set.size());
    }
    for (auto& [key, set] : groups) {
      for (const auto& t : set) terminal_group_[t] = group_labels_.size();
      group_labels_.emplace_back(set.begin(), set.end());
      multiplicity_ *= factorial(set.size());
    }
  }

  const BigInt& multiplicity() const { return multiplicity_; }

  // Rewrites tags and interchangeable terminals in reading order; returns the hash key.
  std::string canonicalize(std::vector<Rollout>& rollouts) const {
    std::vector<std::size_t> next_tag(class_tags_.size(), 0);
    std::vector<std::size_t> next_terminal(group_labels_.size(), 0);
    std::string key;
    for (auto& r : rollouts) {
      for (auto& s : r.states) {
        const std::size_t c = class_index_.at(s.cls);
        s.tag = class_tags_[c][next_tag[c]++];
        append(key, s.cls.value);
      }
      key.push_back('|');
      if (auto it = terminal_group_.find(r.terminal); it != terminal_group_.end()) {
        const std::size_t g = it->second;
        r.terminal = group_labels_[g][next_terminal[g]++];
        append(key, static_cast<std::uint32_t>(g));
      } else {
        key.push_back('!');
        key += r.terminal.str();
      }
      key.push_back(';');
    }
    return key;
  }

 private:
  static void append(std::string& key, std::uint32_t v) {
    key.append(reinterpret_cast<const char*>(&v), sizeof v);
  }

  std::map<ClassId, std::size_t> class_index_;
  std::vector<std::vector<StateTag>> class_tags_;
  std::map<TerminalLabel, std::size_t> terminal_group_;
  std::vector<std::vector<TerminalLabel>> group_labels_;
  BigInt multiplicity_;
};

}  // namespace

Transform Transform::one_point(ClassId cls, StateTag c, StateTag d) {
  return make_pair_transform(TransformKind::OnePoint, cls, std::move(c), std::move(d));
}

Transform Transform::single_swap(ClassId cls, StateTag c, StateTag d) {
  return make_pair_transform(TransformKind::SingleSwap, cls, std::move(c), std::move(d));
}

void apply_in_place(std::vector<Rollout>& rollouts, const Transform& t) {
  switch (t.kind) {
    case TransformKind::Identity: return;
    case TransformKind::OnePoint: chi_in_place(rollouts, t.cls, t.first, t.second); return;
    case TransformKind::SingleSwap: nu_in_place(rollouts, t.cls, t.first, t.second); return;
  }
}

Population apply_chi(const Population& p, ClassId cls, const StateTag& c, const StateTag& d) {
  std::vector<Rollout> rollouts = p.rollouts();
  chi_in_place(rollouts, cls, c, d);
  return Population::assume_valid(std::move(rollouts));
}

Population apply_nu(const Population& p, ClassId cls, const StateTag& c, const StateTag& d) {
  std::vector<Rollout> rollouts = p.rollouts();
  nu_in_place(rollouts, cls, c, d);
  return Population::assume_valid(std::move(rollouts));
}

Population apply(const Population& p, const Transform& t) {
  std::vector<Rollout> rollouts = p.rollouts();
  apply_in_place(rollouts, t);
  return Population::assume_valid(std::move(rollouts));
}

std::vector<Transform> generator_index(const Population& p) {
  std::map<ClassId, std::set<StateTag>> tags;
  for (const auto& r : p.rollouts()) {
    for (const auto& s : r.states) tags[s.cls].insert(s.tag);
  }
  std::vector<Transform> out{Transform::identity()};
  for (const auto& [cls, set] : tags) {
    const std::vector<StateTag> list(set.begin(), set.end());
    for (std::size_t x = 0; x < list.size(); ++x) {
      for (std::size_t y = x + 1; y < list.size(); ++y) {
        out.push_back(Transform::one_point(cls, list[x], list[y]));
        out.push_back(Transform::single_swap(cls, list[x], list[y]));
      }
    }
  }
  return out;
}

TransformDistribution::TransformDistribution(const Population& p0, double identity_probability)
    : identity_probability_(identity_probability) {
  if (!(identity_probability > 0.0 && identity_probability < 1.0)) {
    throw std::invalid_argument("identity probability must lie in (0,1)");
  }
  auto all = generator_index(p0);
  generators_.assign(all.begin() + 1, all.end());
}

RecombinationChain::RecombinationChain(const Population& p0, TransformDistribution mu, std::uint64_t seed)
    : current_(p0.rollouts()), mu_(std::move(mu)), rng_(seed) {}

void RecombinationChain::step() {
  apply_in_place(current_, mu_.sample(rng_));
  ++time_;
}

Rational ChainTrace::phi(std::size_t i) const {
  return Rational(BigInt(counts.at(i)), BigInt(rollouts_seen()));
}

ChainTrace run_chain(const Population& p0, std::uint64_t steps, const TransformDistribution& mu,
                     std::vector<Schema> schemata, std::uint64_t seed) {
  ChainTrace trace{p0, steps, seed, mu.identity_probability(), std::move(schemata), {}};
  trace.counts.assign(trace.schemata.size(), 0);
  RecombinationChain chain(p0, mu, seed);
  auto tally = [&] {
    for (std::size_t i = 0; i < trace.schemata.size(); ++i) {
      trace.counts[i] += schema_count(trace.schemata[i], chain.current());
    }
  };
  tally();
  for (std::uint64_t t = 0; t < steps; ++t) {
    chain.step();
    tally();
  }
  return trace;
}

OrbitCapExceeded::OrbitCapExceeded(std::size_t cap)
    : std::runtime_error("orbit exceeds cap of " + std::to_string(cap) + " representatives"), cap_(cap) {}

OrbitSet enumerate_orbit(const Population& p0, std::size_t cap) {
  const Canonicalizer canon(p0);
  std::vector<Transform> moves;
  for (const auto& t : generator_index(p0)) {
    // ν only relabels, so it never leaves a representative's class.
    if (t.kind == TransformKind::OnePoint) moves.push_back(t);
  }

  std::vector<std::vector<Rollout>> members;
  std::unordered_set<std::string> seen;
  std::vector<Rollout> start = p0.rollouts();
  seen.insert(canon.canonicalize(start));
  members.push_back(std::move(start));

  for (std::size_t head = 0; head < members.size(); ++head) {
    for (const auto& t : moves) {
      std::vector<Rollout> next = members[head];
      apply_in_place(next, t);
      if (!seen.insert(canon.canonicalize(next)).second) continue;
      if (members.size() >= cap) throw OrbitCapExceeded(cap);
      members.push_back(std::move(next));
    }
  }

  OrbitSet orbit{p0, {}, canon.multiplicity(), 0};
  orbit.representatives.reserve(members.size());
  for (auto& m : members) orbit.representatives.push_back(Population::assume_valid(std::move(m)));
  orbit.size = orbit.multiplicity * orbit.representatives.size();
  return orbit;
}

Rational orbit_frequency(const OrbitSet& orbit, const Schema& h) {
  BigInt hits = 0;
  for (const auto& member : orbit.representatives) hits += schema_count(h, member);
  return Rational(hits, BigInt(orbit.representatives.size()) * orbit.initial.size());
}

}  // namespace geiringer
