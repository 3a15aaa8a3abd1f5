#pragma once

#include "geiringer/core_model.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <variant>
#include <vector>

// Eigen 3.4 expressions declare `const_iterator` as void, which Boost 1.74's
// byte-container probe dereferences when Eigen pivots on a multiprecision scalar.
namespace boost::multiprecision::detail {
template <class C>
  requires std::derived_from<C, Eigen::EigenBase<C>>
struct is_byte_container<C> : std::false_type {};
}  // namespace boost::multiprecision::detail

namespace geiringer {

/// Digraph node: an action source, a similarity class, or a terminal sink.
using Node = std::variant<ActionLabel, ClassId, TerminalLabel>;

std::string node_name(const Node& n);

/// Similarity-class digraph with integer succession counts as edge weights.
/// Loops are allowed.
class WeightedDigraph {
 public:
  using Successors = std::map<Node, std::uint64_t>;

  void ingest(const Rollout& r);
  void add_node(const Node& n) { nodes_.insert(n); }
  /// Adds `weight` (> 0) to the edge, creating both endpoints if needed.
  void add_edge(const Node& from, const Node& to, std::uint64_t weight = 1);

  std::uint64_t weight(const Node& from, const Node& to) const;
  /// Empty for unknown nodes and sinks.
  const Successors& successors(const Node& from) const;
  std::uint64_t out_weight(const Node& from) const;

  bool contains(const Node& n) const { return nodes_.contains(n); }
  const std::set<Node>& nodes() const { return nodes_; }
  std::vector<ActionLabel> actions() const;
  std::vector<ClassId> classes() const;
  std::vector<TerminalLabel> terminals() const;
  std::size_t edge_count() const;

  bool operator==(const WeightedDigraph&) const = default;

 private:
  std::set<Node> nodes_;
  std::map<Node, Successors> edges_;
};

/// Single ingestion step: action→first class (or terminal), class→class, last class→terminal.
WeightedDigraph ingest_rollout(WeightedDigraph g, const Rollout& r);
WeightedDigraph build_digraph(const Population& p);

/// Q(s,α) running mean with the update count, plus a Welford second moment
/// for the reported standard deviation.
struct ActionValue {
  double q = 0.0;
  std::uint64_t n = 0;
  double m2 = 0.0;

  void update(double payoff);
  /// Chan's pairwise combination of two independent accumulators.
  void merge(const ActionValue& other);
  double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

using QTable = std::map<ActionLabel, ActionValue>;

/// Q := n/(n+1)·Q + payoff/(n+1); n := n+1.
QTable update_q(QTable q, const ActionLabel& action, double payoff);

struct WalkOutcome {
  ActionLabel start;
  TerminalLabel terminal;
  std::uint64_t length = 0;
  double payoff = 0.0;
};

class NoData : public std::runtime_error {
 public:
  explicit NoData(const ActionLabel& a) : std::runtime_error("no outgoing edges from action '" + a.name + "'") {}
};

class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(std::uint64_t cap)
      : std::runtime_error("walk took " + std::to_string(cap) + " steps without reaching a terminal") {}
};

class Unsolvable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultStepCap = 1'000'000;

/// Immutable integer-indexed view of a digraph for sampling walks.
class WalkTable {
 public:
  explicit WalkTable(const WeightedDigraph& g);

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t index_of(const Node& n) const;
  const Node& node(std::size_t i) const { return nodes_[i]; }
  bool is_terminal(std::size_t i) const { return std::holds_alternative<TerminalLabel>(nodes_[i]); }
  bool has_successors(std::size_t i) const { return !targets_[i].empty(); }

  /// One proportional step; requires has_successors(i).
  template <class Rng>
  std::size_t next(std::size_t i, Rng& rng) const {
    const auto& cumulative = cumulative_[i];
    const std::uint64_t x = std::uniform_int_distribution<std::uint64_t>(0, cumulative.back() - 1)(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    return targets_[i][static_cast<std::size_t>(it - cumulative.begin())];
  }

 private:
  std::vector<Node> nodes_;
  std::map<Node, std::size_t> index_;
  std::vector<std::vector<std::size_t>> targets_;
  std::vector<std::vector<std::uint64_t>> cumulative_;
};

/// Bug walk from an action: each successor is chosen with probability
/// weight / out-weight until a terminal is reached. The payoff is 0 in the
/// returned outcome; callers map the terminal through their PayoffMap.
template <class Rng>
WalkOutcome walk(const WalkTable& table, const ActionLabel& start, std::uint64_t cap, Rng& rng) {
  std::size_t at = table.index_of(start);
  if (at == WalkTable::npos || !table.has_successors(at)) throw NoData(start);
  WalkOutcome out{start, {}, 0, 0.0};
  while (!table.is_terminal(at)) {
    if (out.length == cap) throw CapExceeded(cap);
    at = table.next(at, rng);
    ++out.length;
  }
  out.terminal = std::get<TerminalLabel>(table.node(at));
  return out;
}

template <class Rng>
WalkOutcome walk(const WeightedDigraph& g, const ActionLabel& start, std::uint64_t cap, Rng& rng) {
  return walk(WalkTable(g), start, cap, rng);
}

struct ActionEvaluation {
  ActionValue value;
  std::uint64_t cap_exceeded = 0;
  std::map<TerminalLabel, std::uint64_t> terminal_hits;
};

struct EvaluationReport {
  std::map<ActionLabel, ActionEvaluation> actions;

  QTable q_table() const;
};

struct EvaluationOptions {
  std::uint64_t walks_per_action = 0;
  std::uint64_t step_cap = kDefaultStepCap;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Runs N bug walks per action on a snapshot of g. Walks are split into
/// fixed blocks with their own seeded streams and combined in block order, so
/// the result is independent of the worker count. Duplicate actions merge.
/// Throws NoData for an action without outgoing edges and std::out_of_range
/// when a reached terminal has no payoff.
EvaluationReport evaluate_actions(const WeightedDigraph& g, const std::vector<ActionLabel>& actions,
                                  const PayoffMap& payoffs, const EvaluationOptions& options);

/// Class nodes reachable from an action, ascending.
std::vector<ClassId> reachable_classes(const WeightedDigraph& g, const ActionLabel& a);

/// Expected terminal payoff of a walk from action `a`: solves the absorbing
/// system E_i = Σ_j (w_ij/W_i) E_j + Σ_f (w_if/W_i) φ(f) over the reachable
/// class nodes. Instantiate with Rational for the exact value.
template <class Scalar>
Scalar expected_payoff(const WeightedDigraph& g, const ActionLabel& a, const PayoffMap& payoffs) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Node start{a};
  if (g.out_weight(start) == 0) throw NoData(a);

  const std::vector<ClassId> classes = reachable_classes(g, a);
  std::map<ClassId, Eigen::Index> slot;
  for (std::size_t k = 0; k < classes.size(); ++k) slot[classes[k]] = static_cast<Eigen::Index>(k);

  // Every reachable class must reach a terminal, else I - Q is singular.
  std::set<ClassId> absorbing;
  for (bool changed = true; changed;) {
    changed = false;
    for (ClassId c : classes) {
      if (absorbing.contains(c)) continue;
      for (const auto& [to, w] : g.successors(Node{c})) {
        const bool exits = std::holds_alternative<TerminalLabel>(to) ||
                           absorbing.contains(std::get<ClassId>(to));
        if (exits) {
          absorbing.insert(c);
          changed = true;
          break;
        }
      }
    }
  }
  for (ClassId c : classes) {
    if (!absorbing.contains(c)) {
      throw Unsolvable("class " + std::to_string(c.value) + " cannot reach a terminal");
    }
  }

  auto share = [](std::uint64_t w, std::uint64_t total) {
    return Scalar(static_cast<long long>(w)) / Scalar(static_cast<long long>(total));
  };

  const auto n = static_cast<Eigen::Index>(classes.size());
  Matrix system = Matrix::Identity(n, n);
  Vector rhs = Vector::Zero(n);
  for (ClassId c : classes) {
    const Eigen::Index row = slot.at(c);
    const std::uint64_t total = g.out_weight(Node{c});
    for (const auto& [to, w] : g.successors(Node{c})) {
      if (const auto* t = std::get_if<TerminalLabel>(&to)) {
        rhs(row) += share(w, total) * Scalar(payoffs.at(*t));
      } else {
        system(row, slot.at(std::get<ClassId>(to))) -= share(w, total);
      }
    }
  }
  Vector values = Vector::Zero(n);
  if (n > 0) values = system.partialPivLu().solve(rhs);

  Scalar result(0);
  const std::uint64_t total = g.out_weight(start);
  for (const auto& [to, w] : g.successors(start)) {
    if (const auto* t = std::get_if<TerminalLabel>(&to)) {
      result += share(w, total) * Scalar(payoffs.at(*t));
    } else {
      result += share(w, total) * values(slot.at(std::get<ClassId>(to)));
    }
  }
  return result;
}

Rational exact_expected_payoff(const WeightedDigraph& g, const ActionLabel& a, const PayoffMap& payoffs);

/// Exact probability that a walk from `a` visits exactly `classes` and then
/// stops at a terminal with base label `terminal` (any terminal if empty).
Rational path_probability(const WeightedDigraph& g, const ActionLabel& a, const std::vector<ClassId>& classes,
                          const std::string& terminal = {});

}  // namespace geiringer
