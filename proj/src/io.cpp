#include "geiringer/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace geiringer {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool all_digits(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

std::uint32_t parse_class(const std::string& token, std::size_t index) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v == 0) {
    throw SyntaxError("token " + std::to_string(index) + " ('" + token + "') is not a class id >= 1", index);
  }
  return v;
}

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::string string_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_string() || v.get<std::string>().empty()) fail(where + ": \"" + key + "\" must be a non-empty string");
  return v.get<std::string>();
}

std::uint64_t unsigned_field(const Json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) fail(std::string("\"") + key + "\" must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::int64_t signed_field(const Json& j, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(std::string("\"") + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace

Schema parse_schema(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    tokens.push_back(trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw SyntaxError("token " + std::to_string(i) + " is empty", i);
  }
  if (tokens.size() == 1) {
    if (tokens[0] == "#") return Schema::root();
    throw SyntaxError("schema needs an action and a tail ('#' or terminal)", 0);
  }
  const std::string& action = tokens.front();
  if (action == "#" || all_digits(action)) {
    throw SyntaxError("token 0 ('" + action + "') is not an action label", 0);
  }
  std::vector<ClassId> classes;
  for (std::size_t i = 1; i + 1 < tokens.size(); ++i) classes.push_back(ClassId{parse_class(tokens[i], i)});
  const std::size_t last = tokens.size() - 1;
  const std::string& tail = tokens[last];
  if (tail == "#") return Schema::open({action}, std::move(classes));
  if (all_digits(tail)) {
    throw SyntaxError("token " + std::to_string(last) + " ('" + tail + "'): missing tail, expected '#' or a terminal",
                      last);
  }
  if (tail.find_first_of("#:") != std::string::npos) {
    throw SyntaxError("token " + std::to_string(last) + " ('" + tail + "') is not a terminal base label", last);
  }
  return Schema::closed({action}, std::move(classes), tail);
}

std::string format_schema(const Schema& h) {
  if (h.is_root()) return "#";
  std::string out = h.action().name;
  for (ClassId c : h.classes()) out += "," + std::to_string(c.value);
  out += "," + (h.is_open() ? std::string("#") : h.terminal());
  return out;
}

PopulationFile population_from_json(const Json& j) {
  if (!j.is_object()) fail("population file must be a JSON object");
  const Json& rows = member(j, "rollouts", "population");
  if (!rows.is_array()) fail("\"rollouts\" must be an array");

  std::vector<Rollout> rollouts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "rollout " + std::to_string(i);
    const Json& row = rows[i];
    Rollout r;
    r.action = {string_field(row, "action", where)};
    r.terminal = TerminalLabel::parse(string_field(row, "terminal", where));
    const Json& states = member(row, "states", where);
    if (!states.is_array()) fail(where + ": \"states\" must be an array");
    for (const Json& s : states) {
      if (!s.is_array() || s.size() < 2 || s.size() > 3 || !s[0].is_number_unsigned() || !s[1].is_string() ||
          (s.size() == 3 && !s[2].is_number_unsigned())) {
        fail(where + ": state must be [class, \"tag\", copy]");
      }
      const auto cls = s[0].get<std::uint64_t>();
      if (cls == 0 || cls > UINT32_MAX) fail(where + ": class ids must be in [1, 2^32)");
      const std::string tag = s[1].get<std::string>();
      if (tag.empty()) fail(where + ": empty state tag");
      const std::uint64_t copy = s.size() == 3 ? s[2].get<std::uint64_t>() : 0;
      r.states.push_back({ClassId{static_cast<std::uint32_t>(cls)}, {tag, static_cast<std::uint32_t>(copy)}});
    }
    rollouts.push_back(std::move(r));
  }

  PayoffMap payoffs;
  if (j.contains("payoffs")) {
    const Json& pay = j.at("payoffs");
    if (!pay.is_object()) fail("\"payoffs\" must be an object");
    for (const auto& [label, value] : pay.items()) {
      if (!value.is_string()) fail("payoff for " + label + " must be a \"p/q\" string");
      try {
        payoffs.set(TerminalLabel::parse(label), parse_rational(value.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        fail("payoff for " + label + ": " + e.what());
      }
    }
  }
  return {make_population(std::move(rollouts)), std::move(payoffs)};
}

Json to_json(const Population& p) {
  Json rows = Json::array();
  for (const auto& r : p.rollouts()) {
    Json states = Json::array();
    for (const auto& s : r.states) states.push_back(Json::array({s.cls.value, s.tag.symbol, s.tag.copy}));
    rows.push_back({{"action", r.action.name}, {"states", states}, {"terminal", r.terminal.str()}});
  }
  return {{"rollouts", rows}};
}

Json to_json(const PopulationFile& file) {
  Json j = to_json(file.population);
  Json pay = Json::object();
  for (const auto& [label, value] : file.payoffs.values()) pay[label.str()] = to_string(value);
  j["payoffs"] = pay;
  return j;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

PopulationFile read_population_file(const std::filesystem::path& path) {
  return population_from_json(read_json_file(path));
}

PopulationFile roundtrip_population(const std::filesystem::path& path) {
  const PopulationFile first = read_population_file(path);
  return population_from_json(Json::parse(canonical_dump(to_json(first))));
}

Json to_json(const WeightedDigraph& g) {
  Json actions = Json::array(), classes = Json::array(), terminals = Json::array();
  for (const auto& a : g.actions()) actions.push_back(a.name);
  for (const auto& c : g.classes()) classes.push_back(node_name(Node{c}));
  for (const auto& t : g.terminals()) terminals.push_back(t.str());
  Json edges = Json::array();
  for (const auto& from : g.nodes()) {
    for (const auto& [to, w] : g.successors(from)) edges.push_back(Json::array({node_name(from), node_name(to), w}));
  }
  return {{"nodes", {{"actions", actions}, {"classes", classes}, {"terminals", terminals}}}, {"edges", edges}};
}

WeightedDigraph digraph_from_json(const Json& j) {
  const Json& nodes = member(j, "nodes", "digraph");
  std::map<std::string, Node> by_name;
  auto declare = [&](const std::string& name, Node n) {
    if (!by_name.emplace(name, std::move(n)).second) fail("digraph: node name '" + name + "' is ambiguous");
  };
  for (const auto& a : member(nodes, "actions", "digraph")) declare(a.get<std::string>(), ActionLabel{a.get<std::string>()});
  for (const auto& c : member(nodes, "classes", "digraph")) {
    const std::string name = c.get<std::string>();
    std::uint32_t id = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), id);
    if (name.size() < 2 || name[0] != 'c' || ec != std::errc() || ptr != name.data() + name.size() || id == 0) {
      fail("digraph: class node '" + name + "' must be c<id>");
    }
    declare(name, ClassId{id});
  }
  for (const auto& t : member(nodes, "terminals", "digraph")) {
    declare(t.get<std::string>(), TerminalLabel::parse(t.get<std::string>()));
  }

  WeightedDigraph g;
  for (const auto& [name, n] : by_name) g.add_node(n);
  for (const auto& e : member(j, "edges", "digraph")) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_number_unsigned() ||
        e[2].get<std::uint64_t>() == 0) {
      fail("digraph: edge must be [from, to, weight > 0]");
    }
    auto from = by_name.find(e[0].get<std::string>());
    auto to = by_name.find(e[1].get<std::string>());
    if (from == by_name.end() || to == by_name.end()) fail("digraph: edge references an undeclared node");
    if (std::holds_alternative<TerminalLabel>(from->second)) fail("digraph: terminals cannot have outgoing edges");
    if (std::holds_alternative<ActionLabel>(to->second)) fail("digraph: actions cannot have incoming edges");
    g.add_edge(from->second, to->second, e[2].get<std::uint64_t>());
  }
  return g;
}

Json to_json(const DownReport& d) {
  auto class_key = [](ClassId c) { return std::to_string(c.value); };
  Json actions = Json::object();
  for (const auto& [a, count] : d.action_rollouts) {
    Json succ = Json::array(), order = Json::object(), terms = Json::array();
    if (auto it = d.action_successors.find(a); it != d.action_successors.end()) {
      for (ClassId j : it->second) {
        succ.push_back(j.value);
        order[class_key(j)] = d.order(a, j);
      }
    }
    if (auto it = d.action_terminals.find(a); it != d.action_terminals.end()) {
      for (const auto& t : it->second) terms.push_back(t.str());
    }
    actions[a.name] = {{"rollouts", count}, {"successors", succ}, {"order", order}, {"terminals", terms}};
  }
  Json classes = Json::object();
  for (const auto& [i, occ] : d.occurrences) {
    Json succ = Json::array(), order = Json::object(), terms = Json::array();
    if (auto it = d.class_successors.find(i); it != d.class_successors.end()) {
      for (ClassId j : it->second) {
        succ.push_back(j.value);
        order[class_key(j)] = d.order(i, j);
      }
    }
    if (auto it = d.class_terminals.find(i); it != d.class_terminals.end()) {
      for (const auto& t : it->second) terms.push_back(t.str());
    }
    classes[class_key(i)] = {{"successors", succ}, {"order", order}, {"terminals", terms},
                             {"terminal_count", d.terminal_count(i)}, {"occurrences", occ}};
  }
  return {{"b", d.population_size}, {"actions", actions}, {"classes", classes}};
}

Json to_json(const SimConfig& cfg) {
  return {{"states", cfg.states},         {"observations", cfg.observations},
          {"actions", cfg.actions},       {"max_branching", cfg.max_branching},
          {"depth_cap", cfg.depth_cap},   {"payoff_min", cfg.payoff_min},
          {"payoff_max", cfg.payoff_max}, {"rollouts", cfg.rollouts},
          {"seed", cfg.seed},             {"cap_payoff", to_string(cfg.cap_payoff)}};
}

SimConfig sim_config_from_json(const Json& j) {
  if (!j.is_object()) fail("env config must be a JSON object");
  SimConfig cfg;
  auto u32 = [&](const char* key, std::uint32_t fallback) {
    const auto v = unsigned_field(j, key, fallback);
    if (v > UINT32_MAX) fail(std::string("\"") + key + "\" is too large");
    return static_cast<std::uint32_t>(v);
  };
  cfg.states = u32("states", cfg.states);
  cfg.observations = u32("observations", cfg.observations);
  cfg.actions = u32("actions", cfg.actions);
  cfg.max_branching = u32("max_branching", cfg.max_branching);
  cfg.depth_cap = u32("depth_cap", cfg.depth_cap);
  cfg.rollouts = u32("rollouts", cfg.rollouts);
  cfg.payoff_min = signed_field(j, "payoff_min", cfg.payoff_min);
  cfg.payoff_max = signed_field(j, "payoff_max", cfg.payoff_max);
  cfg.seed = unsigned_field(j, "seed", cfg.seed);
  if (j.contains("cap_payoff")) {
    if (!j.at("cap_payoff").is_string()) fail("\"cap_payoff\" must be a \"p/q\" string");
    try {
      cfg.cap_payoff = parse_rational(j.at("cap_payoff").get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(std::string("cap_payoff: ") + e.what());
    }
  }
  return cfg;
}

Json to_json(const EnvModel& env) {
  Json states = Json::array();
  for (std::uint32_t s = 0; s < env.transitions.size(); ++s) {
    Json transitions = Json::object();
    for (std::size_t a = 0; a < env.transitions[s].size(); ++a) {
      const Transition& tr = env.transitions[s][a];
      if (tr.successors.empty()) continue;
      transitions[env.action_alphabet[a].name] = {
          {"successors", tr.successors}, {"weights", tr.weights}, {"terminate", to_string(tr.terminate)}};
    }
    states.push_back({{"state", s},
                      {"observation", s == 0 ? Json(nullptr) : Json(env.observation[s].value)},
                      {"payoff_range", {env.payoff_range[s].first, env.payoff_range[s].second}},
                      {"transitions", transitions}});
  }
  Json actions = Json::array();
  for (const auto& a : env.action_alphabet) actions.push_back(a.name);
  return {{"config", to_json(env.config)}, {"actions", actions}, {"states", states}};
}

}  // namespace geiringer
