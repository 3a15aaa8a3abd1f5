#pragma once

#include "geiringer/core_model.hpp"

#include <map>
#include <set>
#include <utility>

namespace geiringer {

/// Successor sets and succession counts of a population.
///
/// `action_successors[a]` is the set of classes immediately following action
/// a; `class_successors[i]` / `class_terminals[i]` split the successor set of
/// class i into classes and terminal labels. Counts are keyed by pair and
/// only stored when non-zero, so an absent key means Order(...) = 0.
/// Rollouts without states contribute to `action_terminals` only.
struct DownReport {
  std::size_t population_size = 0;
  std::map<ActionLabel, std::size_t> action_rollouts;
  std::map<ActionLabel, std::set<ClassId>> action_successors;
  std::map<ActionLabel, std::set<TerminalLabel>> action_terminals;
  std::map<ClassId, std::set<ClassId>> class_successors;
  std::map<ClassId, std::set<TerminalLabel>> class_terminals;
  std::map<std::pair<ActionLabel, ClassId>, std::size_t> action_order;
  std::map<std::pair<ClassId, ClassId>, std::size_t> class_order;
  std::map<ClassId, std::size_t> occurrences;

  std::size_t order(const ActionLabel& a, ClassId j) const;
  std::size_t order(ClassId i, ClassId j) const;
  /// i↓_Σ: number of terminal labels directly following class i.
  std::size_t terminal_count(ClassId i) const;
  /// Σ_j Order(i↓j) + i↓_Σ.
  std::size_t occurrence_total(ClassId i) const;

  bool operator==(const DownReport&) const = default;
};

DownReport down_report(const std::vector<Rollout>& rollouts);
inline DownReport down_report(const Population& p) { return down_report(p.rollouts()); }

/// Large-inflation limiting frequency of schema h under recombination:
///
///   Order(α↓i₁)/b · Π_q Order(i_{q-1}↓i_q)/occ(i_{q-1}) · LF
///
/// with LF = 1 for '#', and (terminals with base label f after i_{k-1}) /
/// occ(i_{k-1}) for a terminal tail. A factor with zero numerator is zero.
/// Schemata with no classes reduce to action counts: (α,#) gives
/// |rollouts with α|/b and (α,f) the share of state-less α-rollouts ending in f.
Rational limiting_frequency(const DownReport& report, const Schema& h);
inline Rational limiting_frequency(const Population& p, const Schema& h) {
  return limiting_frequency(down_report(p), h);
}

/// limiting_frequency for every one-step extension of a '#'-tailed schema:
/// h·j·# for each class successor j and h·f for each terminal base label f.
/// For ROOT the children are (α,#) for each action.
std::map<Schema, Rational> frequency_children(const DownReport& report, const Schema& h);
inline std::map<Schema, Rational> frequency_children(const Population& p, const Schema& h) {
  return frequency_children(down_report(p), h);
}

}  // namespace geiringer
