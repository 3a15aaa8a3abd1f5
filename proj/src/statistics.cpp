#include "geiringer/statistics.hpp"

#include <algorithm>
#include <stdexcept>

namespace geiringer {

namespace {

template <class Map, class Key>
std::size_t lookup(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}

// Zero convention: a zero numerator makes the factor zero whatever the denominator.
Rational ratio(std::size_t num, std::size_t den) {
  if (num == 0) return Rational(0);
  return Rational(BigInt(num), BigInt(den));
}

std::size_t terminals_named(const std::set<TerminalLabel>& terminals, const std::string& name) {
  return static_cast<std::size_t>(std::count_if(terminals.begin(), terminals.end(),
                                                [&](const TerminalLabel& t) { return t.name == name; }));
}

}  // namespace

std::size_t DownReport::order(const ActionLabel& a, ClassId j) const {
  return lookup(action_order, std::pair{a, j});
}

std::size_t DownReport::order(ClassId i, ClassId j) const { return lookup(class_order, std::pair{i, j}); }

std::size_t DownReport::terminal_count(ClassId i) const {
  auto it = class_terminals.find(i);
  return it == class_terminals.end() ? 0 : it->second.size();
}

std::size_t DownReport::occurrence_total(ClassId i) const {
  std::size_t total = terminal_count(i);
  if (auto it = class_successors.find(i); it != class_successors.end()) {
    for (ClassId j : it->second) total += order(i, j);
  }
  return total;
}

DownReport down_report(const std::vector<Rollout>& rollouts) {
  DownReport d;
  d.population_size = rollouts.size();
  for (const auto& r : rollouts) {
    ++d.action_rollouts[r.action];
    if (r.states.empty()) {
      d.action_terminals[r.action].insert(r.terminal);
      continue;
    }
    const ClassId first = r.states.front().cls;
    d.action_successors[r.action].insert(first);
    ++d.action_order[{r.action, first}];
    for (std::size_t k = 0; k < r.states.size(); ++k) {
      const ClassId i = r.states[k].cls;
      ++d.occurrences[i];
      if (k + 1 < r.states.size()) {
        const ClassId j = r.states[k + 1].cls;
        d.class_successors[i].insert(j);
        ++d.class_order[{i, j}];
      } else {
        d.class_terminals[i].insert(r.terminal);
      }
    }
  }
  return d;
}

Rational limiting_frequency(const DownReport& d, const Schema& h) {
  if (h.is_root()) return Rational(1);
  const std::size_t b = d.population_size;
  const auto& classes = h.classes();

  if (classes.empty()) {
    if (h.is_open()) return ratio(lookup(d.action_rollouts, h.action()), b);
    auto it = d.action_terminals.find(h.action());
    return ratio(it == d.action_terminals.end() ? 0 : terminals_named(it->second, h.terminal()), b);
  }

  Rational value = ratio(d.order(h.action(), classes.front()), b);
  for (std::size_t q = 1; q < classes.size() && value != 0; ++q) {
    value *= ratio(d.order(classes[q - 1], classes[q]), lookup(d.occurrences, classes[q - 1]));
  }
  if (value == 0 || h.is_open()) return value;

  const ClassId last = classes.back();
  auto it = d.class_terminals.find(last);
  const std::size_t hits = it == d.class_terminals.end() ? 0 : terminals_named(it->second, h.terminal());
  return value * ratio(hits, lookup(d.occurrences, last));
}

std::map<Schema, Rational> frequency_children(const DownReport& d, const Schema& h) {
  std::map<Schema, Rational> children;
  if (h.is_root()) {
    for (const auto& [action, count] : d.action_rollouts) {
      const Schema child = Schema::open(action, {});
      children.emplace(child, limiting_frequency(d, child));
    }
    return children;
  }
  if (!h.is_open()) throw std::invalid_argument("frequency_children needs a '#'-tailed schema");

  const std::set<ClassId>* next_classes = nullptr;
  const std::set<TerminalLabel>* next_terminals = nullptr;
  if (h.classes().empty()) {
    if (auto it = d.action_successors.find(h.action()); it != d.action_successors.end()) next_classes = &it->second;
    if (auto it = d.action_terminals.find(h.action()); it != d.action_terminals.end()) next_terminals = &it->second;
  } else {
    const ClassId last = h.classes().back();
    if (auto it = d.class_successors.find(last); it != d.class_successors.end()) next_classes = &it->second;
    if (auto it = d.class_terminals.find(last); it != d.class_terminals.end()) next_terminals = &it->second;
  }
  if (next_classes) {
    for (ClassId j : *next_classes) {
      const Schema child = h.extended(j);
      children.emplace(child, limiting_frequency(d, child));
    }
  }
  if (next_terminals) {
    for (const auto& f : *next_terminals) {
      const Schema child = h.terminated(f.name);
      if (!children.contains(child)) children.emplace(child, limiting_frequency(d, child));
    }
  }
  return children;
}

}  // namespace geiringer
