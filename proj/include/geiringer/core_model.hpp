#pragma once

#include "geiringer/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace geiringer {

/// Equivalence (similarity) class of hidden states; what the agent observes.
struct ClassId {
  std::uint32_t value = 1;

  ClassId() = default;
  explicit ClassId(std::uint32_t v) : value(v) {
    if (v == 0) throw std::invalid_argument("class id must be >= 1");
  }
  auto operator<=>(const ClassId&) const = default;
};

/// Letter distinguishing formally distinct states of one class. `copy` is
/// only non-zero for states produced by inflation.
struct StateTag {
  std::string symbol;
  std::uint32_t copy = 0;

  auto operator<=>(const StateTag&) const = default;
};

std::string to_string(const StateTag& tag);

struct TaggedState {
  ClassId cls;
  StateTag tag;

  auto operator<=>(const TaggedState&) const = default;
};

struct ActionLabel {
  std::string name;

  auto operator<=>(const ActionLabel&) const = default;
};

/// Terminal label. Inflated copies share `name` and differ in `copy`;
/// the text form is "name" for copy 0 and "name:copy" otherwise.
struct TerminalLabel {
  std::string name;
  std::uint32_t copy = 0;

  auto operator<=>(const TerminalLabel&) const = default;

  std::string str() const;
  static TerminalLabel parse(const std::string& text);
};

struct Rollout {
  ActionLabel action;
  std::vector<TaggedState> states;
  TerminalLabel terminal;

  std::size_t height() const { return states.size(); }
  bool operator==(const Rollout&) const = default;
};

/// Terminal payoffs. Lookup falls back from an inflated copy "f:k" to the
/// base label "f" so that one map serves a population and its inflations.
class PayoffMap {
 public:
  PayoffMap() = default;
  explicit PayoffMap(std::map<TerminalLabel, Rational> values) : values_(std::move(values)) {}

  void set(const TerminalLabel& label, Rational value) { values_[label] = std::move(value); }
  const Rational* find(const TerminalLabel& label) const;
  /// Throws std::out_of_range when the label has no payoff.
  const Rational& at(const TerminalLabel& label) const;
  const std::map<TerminalLabel, Rational>& values() const { return values_; }
  bool empty() const { return values_.empty(); }

  bool operator==(const PayoffMap&) const = default;

 private:
  std::map<TerminalLabel, Rational> values_;
};

enum class ViolationKind { DuplicateState, DuplicateTerminal, EmptyPopulation, EmptyLabel };

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<std::size_t> rollouts;  // offending rollout indices, ascending
  std::string detail;

  bool operator==(const Violation&) const = default;
};

class Population;
using ValidationResult = std::variant<Population, std::vector<Violation>>;

/// An ordered sample of b >= 1 rollouts whose state occurrences and terminal
/// labels are pairwise distinct. Only obtainable through validation (or from
/// operations that preserve both invariants).
class Population {
 public:
  const std::vector<Rollout>& rollouts() const { return rollouts_; }
  const Rollout& operator[](std::size_t i) const { return rollouts_[i]; }
  std::size_t size() const { return rollouts_.size(); }

  bool operator==(const Population&) const = default;

  /// For operations that provably keep both distinctness invariants
  /// (crossover, inflation, canonical relabeling). No checks are made.
  static Population assume_valid(std::vector<Rollout> rollouts) {
    return Population(std::move(rollouts));
  }

 private:
  explicit Population(std::vector<Rollout> rollouts) : rollouts_(std::move(rollouts)) {}

  std::vector<Rollout> rollouts_;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Returns the population, or every violation found.
ValidationResult validate_population(std::vector<Rollout> rollouts);

/// Throwing form of validate_population.
Population make_population(std::vector<Rollout> rollouts);

/// Equal class implies equal position in the rollout, across the whole population.
bool is_homologous(const Population& p);

/// m copies of each rollout, tags and terminals carrying copy indices, so
/// inflate(p, 1) == p. Copies of rollout i are contiguous.
Population inflate(const Population& p, std::uint32_t m);

/// Holland-Poli rollout schema: ROOT ("#"), (action, classes..., #) or
/// (action, classes..., terminal). A terminal tail names a base terminal
/// label and matches every inflated copy of it.
class Schema {
 public:
  static Schema root() { return Schema(); }
  static Schema open(ActionLabel action, std::vector<ClassId> classes);
  static Schema closed(ActionLabel action, std::vector<ClassId> classes, std::string terminal);

  bool is_root() const { return !action_.has_value(); }
  bool is_open() const { return !is_root() && !terminal_.has_value(); }
  const ActionLabel& action() const { return *action_; }
  const std::vector<ClassId>& classes() const { return classes_; }
  const std::string& terminal() const { return *terminal_; }

  /// h·j·# for an open schema.
  Schema extended(ClassId next) const;
  /// h·f for an open schema.
  Schema terminated(std::string terminal) const;

  auto operator<=>(const Schema&) const = default;

 private:
  Schema() = default;

  std::optional<ActionLabel> action_;
  std::vector<ClassId> classes_;
  std::optional<std::string> terminal_;
};

/// `#` matches zero or more further states before the terminal.
bool schema_match(const Schema& h, const Rollout& r);

std::size_t schema_count(const Schema& h, const std::vector<Rollout>& rollouts);
inline std::size_t schema_count(const Schema& h, const Population& p) {
  return schema_count(h, p.rollouts());
}

}  // namespace geiringer
