#include "geiringer/core_model.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace geiringer {

std::string to_string(const StateTag& tag) {
  return tag.copy == 0 ? tag.symbol : tag.symbol + ":" + std::to_string(tag.copy);
}

std::string TerminalLabel::str() const {
  return copy == 0 ? name : name + ":" + std::to_string(copy);
}

TerminalLabel TerminalLabel::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) return {text, 0};
  std::uint32_t copy = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, copy);
  if (ec != std::errc() || ptr != last) return {text, 0};
  return {text.substr(0, colon), copy};
}

const Rational* PayoffMap::find(const TerminalLabel& label) const {
  if (auto it = values_.find(label); it != values_.end()) return &it->second;
  if (label.copy != 0) {
    if (auto it = values_.find(TerminalLabel{label.name, 0}); it != values_.end()) return &it->second;
  }
  return nullptr;
}

const Rational& PayoffMap::at(const TerminalLabel& label) const {
  if (const Rational* v = find(label)) return *v;
  throw std::out_of_range("no payoff for terminal '" + label.str() + "'");
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateState: return "DuplicateState";
    case ViolationKind::DuplicateTerminal: return "DuplicateTerminal";
    case ViolationKind::EmptyPopulation: return "EmptyPopulation";
    case ViolationKind::EmptyLabel: return "EmptyLabel";
  }
  return "Unknown";
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "invalid population:";
  for (const auto& v : violations) {
    os << " " << to_string(v.kind) << "(" << v.detail << "; rollouts";
    for (auto i : v.rollouts) os << " " << i;
    os << ")";
  }
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

ValidationResult validate_population(std::vector<Rollout> rollouts) {
  std::vector<Violation> violations;
  if (rollouts.empty()) {
    violations.push_back({ViolationKind::EmptyPopulation, {}, "population has no rollouts"});
    return violations;
  }

  std::map<TaggedState, std::vector<std::size_t>> state_sites;
  std::map<TerminalLabel, std::vector<std::size_t>> terminal_sites;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    const Rollout& r = rollouts[i];
    if (r.action.name.empty()) {
      violations.push_back({ViolationKind::EmptyLabel, {i}, "empty action label"});
    }
    if (r.terminal.name.empty()) {
      violations.push_back({ViolationKind::EmptyLabel, {i}, "empty terminal label"});
    }
    for (const auto& s : r.states) state_sites[s].push_back(i);
    terminal_sites[r.terminal].push_back(i);
  }
  for (auto& [state, sites] : state_sites) {
    if (sites.size() < 2) continue;
    violations.push_back({ViolationKind::DuplicateState, sites,
                          "state (" + std::to_string(state.cls.value) + "," + to_string(state.tag) +
                              ") occurs " + std::to_string(sites.size()) + " times"});
  }
  for (auto& [label, sites] : terminal_sites) {
    if (sites.size() < 2) continue;
    violations.push_back({ViolationKind::DuplicateTerminal, sites,
                          "terminal " + label.str() + " occurs " + std::to_string(sites.size()) + " times"});
  }
  if (!violations.empty()) return violations;
  return Population::assume_valid(std::move(rollouts));
}

Population make_population(std::vector<Rollout> rollouts) {
  auto result = validate_population(std::move(rollouts));
  if (auto* violations = std::get_if<std::vector<Violation>>(&result)) {
    throw ValidationError(std::move(*violations));
  }
  return std::get<Population>(std::move(result));
}

bool is_homologous(const Population& p) {
  std::map<ClassId, std::size_t> position;
  for (const auto& r : p.rollouts()) {
    for (std::size_t k = 0; k < r.states.size(); ++k) {
      auto [it, inserted] = position.emplace(r.states[k].cls, k);
      if (!inserted && it->second != k) return false;
    }
  }
  return true;
}

Population inflate(const Population& p, std::uint32_t m) {
  if (m == 0) throw std::invalid_argument("inflation factor must be >= 1");
  std::vector<Rollout> out;
  out.reserve(p.size() * m);
  for (const auto& r : p.rollouts()) {
    for (std::uint32_t k = 0; k < m; ++k) {
      Rollout copy = r;
      for (auto& s : copy.states) s.tag.copy = s.tag.copy * m + k;
      copy.terminal.copy = copy.terminal.copy * m + k;
      out.push_back(std::move(copy));
    }
  }
  return Population::assume_valid(std::move(out));
}

Schema Schema::open(ActionLabel action, std::vector<ClassId> classes) {
  Schema h;
  h.action_ = std::move(action);
  h.classes_ = std::move(classes);
  return h;
}

Schema Schema::closed(ActionLabel action, std::vector<ClassId> classes, std::string terminal) {
  Schema h = open(std::move(action), std::move(classes));
  h.terminal_ = std::move(terminal);
  return h;
}

Schema Schema::extended(ClassId next) const {
  if (!is_open()) throw std::logic_error("only '#'-tailed schemata can be extended");
  Schema h = *this;
  h.classes_.push_back(next);
  return h;
}

Schema Schema::terminated(std::string terminal) const {
  if (!is_open()) throw std::logic_error("only '#'-tailed schemata can be terminated");
  Schema h = *this;
  h.terminal_ = std::move(terminal);
  return h;
}

bool schema_match(const Schema& h, const Rollout& r) {
  if (h.is_root()) return true;
  if (r.action != h.action()) return false;
  const auto& classes = h.classes();
  if (r.states.size() < classes.size()) return false;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (r.states[k].cls != classes[k]) return false;
  }
  if (h.is_open()) return true;
  return r.states.size() == classes.size() && r.terminal.name == h.terminal();
}

std::size_t schema_count(const Schema& h, const std::vector<Rollout>& rollouts) {
  return static_cast<std::size_t>(
      std::count_if(rollouts.begin(), rollouts.end(), [&](const Rollout& r) { return schema_match(h, r); }));
}

}  // namespace geiringer
