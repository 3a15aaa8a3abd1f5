#include "geiringer/digraph.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <thread>

namespace geiringer {

std::string node_name(const Node& n) {
  struct {
    std::string operator()(const ActionLabel& a) const { return a.name; }
    std::string operator()(ClassId c) const { return "c" + std::to_string(c.value); }
    std::string operator()(const TerminalLabel& t) const { return t.str(); }
  } visitor;
  return std::visit(visitor, n);
}

void WeightedDigraph::add_edge(const Node& from, const Node& to, std::uint64_t weight) {
  if (weight == 0) throw std::invalid_argument("edge weights must be positive");
  nodes_.insert(from);
  nodes_.insert(to);
  edges_[from][to] += weight;
}

void WeightedDigraph::ingest(const Rollout& r) {
  Node previous{r.action};
  for (const auto& s : r.states) {
    const Node here{s.cls};
    add_edge(previous, here);
    previous = here;
  }
  add_edge(previous, Node{r.terminal});
}

std::uint64_t WeightedDigraph::weight(const Node& from, const Node& to) const {
  const auto& succ = successors(from);
  auto it = succ.find(to);
  return it == succ.end() ? 0 : it->second;
}

const WeightedDigraph::Successors& WeightedDigraph::successors(const Node& from) const {
  static const Successors none;
  auto it = edges_.find(from);
  return it == edges_.end() ? none : it->second;
}

std::uint64_t WeightedDigraph::out_weight(const Node& from) const {
  std::uint64_t total = 0;
  for (const auto& [to, w] : successors(from)) total += w;
  return total;
}

std::vector<ActionLabel> WeightedDigraph::actions() const {
  std::vector<ActionLabel> out;
  for (const auto& n : nodes_) {
    if (const auto* a = std::get_if<ActionLabel>(&n)) out.push_back(*a);
  }
  return out;
}

std::vector<ClassId> WeightedDigraph::classes() const {
  std::vector<ClassId> out;
  for (const auto& n : nodes_) {
    if (const auto* c = std::get_if<ClassId>(&n)) out.push_back(*c);
  }
  return out;
}

std::vector<TerminalLabel> WeightedDigraph::terminals() const {
  std::vector<TerminalLabel> out;
  for (const auto& n : nodes_) {
    if (const auto* t = std::get_if<TerminalLabel>(&n)) out.push_back(*t);
  }
  return out;
}

std::size_t WeightedDigraph::edge_count() const {
  std::size_t count = 0;
  for (const auto& [from, succ] : edges_) count += succ.size();
  return count;
}

WeightedDigraph ingest_rollout(WeightedDigraph g, const Rollout& r) {
  g.ingest(r);
  return g;
}

WeightedDigraph build_digraph(const Population& p) {
  WeightedDigraph g;
  for (const auto& r : p.rollouts()) g.ingest(r);
  return g;
}

void ActionValue::update(double payoff) {
  const double n1 = static_cast<double>(n + 1);
  const double delta = payoff - q;
  q = static_cast<double>(n) / n1 * q + payoff / n1;
  m2 += delta * (payoff - q);
  ++n;
}

void ActionValue::merge(const ActionValue& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double total = na + nb;
  const double delta = other.q - q;
  q = (na * q + nb * other.q) / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

QTable update_q(QTable q, const ActionLabel& action, double payoff) {
  q[action].update(payoff);
  return q;
}

WalkTable::WalkTable(const WeightedDigraph& g) {
  for (const auto& n : g.nodes()) {
    index_.emplace(n, nodes_.size());
    nodes_.push_back(n);
  }
  targets_.resize(nodes_.size());
  cumulative_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::uint64_t running = 0;
    for (const auto& [to, w] : g.successors(nodes_[i])) {
      running += w;
      targets_[i].push_back(index_.at(to));
      cumulative_[i].push_back(running);
    }
  }
}

std::size_t WalkTable::index_of(const Node& n) const {
  auto it = index_.find(n);
  return it == index_.end() ? npos : it->second;
}

QTable EvaluationReport::q_table() const {
  QTable q;
  for (const auto& [action, eval] : actions) {
    if (eval.value.n > 0) q[action] = eval.value;
  }
  return q;
}

namespace {

constexpr std::uint64_t kWalksPerBlock = 4096;

struct Block {
  std::size_t action;
  std::uint64_t index;
  std::uint64_t walks;
};

}  // namespace

EvaluationReport evaluate_actions(const WeightedDigraph& g, const std::vector<ActionLabel>& actions,
                                  const PayoffMap& payoffs, const EvaluationOptions& options) {
  EvaluationReport report;
  if (options.walks_per_action == 0) return report;

  const std::set<ActionLabel> distinct(actions.begin(), actions.end());
  const std::vector<ActionLabel> order(distinct.begin(), distinct.end());
  const WalkTable table(g);
  for (const auto& a : order) {
    const std::size_t at = table.index_of(Node{a});
    if (at == WalkTable::npos || !table.has_successors(at)) throw NoData(a);
  }

  // Payoffs resolved once per terminal so workers never touch the map.
  std::vector<double> payoff_of(g.nodes().size(), 0.0);
  for (const auto& t : g.terminals()) {
    if (const Rational* v = payoffs.find(t)) payoff_of[table.index_of(Node{t})] = to_double(*v);
  }
  std::vector<bool> has_payoff(g.nodes().size(), false);
  for (const auto& t : g.terminals()) has_payoff[table.index_of(Node{t})] = payoffs.find(t) != nullptr;

  std::vector<Block> blocks;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::uint64_t start = 0, k = 0; start < options.walks_per_action; start += kWalksPerBlock, ++k) {
      blocks.push_back({a, k, std::min(kWalksPerBlock, options.walks_per_action - start)});
    }
  }

  struct BlockResult {
    ActionValue value;
    std::uint64_t cap_exceeded = 0;
    std::map<std::size_t, std::uint64_t> hits;
    std::string error;
  };
  std::vector<BlockResult> results(blocks.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t b = next++; b < blocks.size(); b = next++) {
      const Block& block = blocks[b];
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(block.action), static_cast<std::uint32_t>(block.index),
                        static_cast<std::uint32_t>(block.index >> 32)};
      std::mt19937_64 rng(seq);
      BlockResult& out = results[b];
      const ActionLabel& start = order[block.action];
      for (std::uint64_t w = 0; w < block.walks; ++w) {
        std::size_t at = table.index_of(Node{start});
        std::uint64_t length = 0;
        while (!table.is_terminal(at) && length < options.step_cap) {
          at = table.next(at, rng);
          ++length;
        }
        if (!table.is_terminal(at)) {
          ++out.cap_exceeded;
          continue;
        }
        if (!has_payoff[at]) {
          out.error = "no payoff for terminal '" + node_name(table.node(at)) + "'";
          return;
        }
        out.value.update(payoff_of[at]);
        ++out.hits[at];
      }
    }
  };

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const BlockResult& r = results[b];
    if (!r.error.empty()) throw std::out_of_range(r.error);
    ActionEvaluation& eval = report.actions[order[blocks[b].action]];
    eval.value.merge(r.value);
    eval.cap_exceeded += r.cap_exceeded;
    for (const auto& [node, count] : r.hits) {
      eval.terminal_hits[std::get<TerminalLabel>(table.node(node))] += count;
    }
  }
  return report;
}

std::vector<ClassId> reachable_classes(const WeightedDigraph& g, const ActionLabel& a) {
  std::set<ClassId> seen;
  std::deque<Node> frontier{Node{a}};
  while (!frontier.empty()) {
    const Node at = frontier.front();
    frontier.pop_front();
    for (const auto& [to, w] : g.successors(at)) {
      if (const auto* c = std::get_if<ClassId>(&to); c && seen.insert(*c).second) frontier.push_back(to);
    }
  }
  return {seen.begin(), seen.end()};
}

Rational exact_expected_payoff(const WeightedDigraph& g, const ActionLabel& a, const PayoffMap& payoffs) {
  return expected_payoff<Rational>(g, a, payoffs);
}

Rational path_probability(const WeightedDigraph& g, const ActionLabel& a, const std::vector<ClassId>& classes,
                          const std::string& terminal) {
  Rational p(1);
  Node at{a};
  for (ClassId c : classes) {
    const std::uint64_t w = g.weight(at, Node{c});
    if (w == 0) return Rational(0);
    p *= Rational(BigInt(w), BigInt(g.out_weight(at)));
    at = Node{c};
  }
  std::uint64_t exits = 0;
  for (const auto& [to, w] : g.successors(at)) {
    const auto* t = std::get_if<TerminalLabel>(&to);
    if (t && (terminal.empty() || t->name == terminal)) exits += w;
  }
  if (exits == 0) return Rational(0);
  return p * Rational(BigInt(exits), BigInt(g.out_weight(at)));
}

}  // namespace geiringer
