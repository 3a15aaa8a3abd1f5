#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geiringer/fixtures.hpp"
#include "geiringer/io.hpp"
#include "geiringer/recombination.hpp"
#include "geiringer/statistics.hpp"

using namespace geiringer;

namespace {

Schema S(const char* text) { return parse_schema(text); }

const ActionLabel kAlpha{"alpha"};
const ActionLabel kBeta{"beta"};
const ClassId c1{1}, c2{2}, c5{5};

}  // namespace

TEST_CASE("down report of P_A") {
  const DownReport d = down_report(fixtures::population_a());
  CHECK(d.action_successors.at(kAlpha) == std::set<ClassId>{c1});
  CHECK(d.action_successors.at(kBeta) == std::set<ClassId>{c1});
  CHECK(d.class_successors.at(c1) == std::set<ClassId>{c2});
  CHECK_FALSE(d.class_successors.contains(c2));
  CHECK(d.order(c1, c2) == 3);
  CHECK(d.terminal_count(c1) == 0);
  CHECK(d.class_terminals.at(c2) ==
        std::set<TerminalLabel>{{"f1", 0}, {"f2", 0}, {"f3", 0}});
  CHECK(d.terminal_count(c2) == 3);
  CHECK(d.order(kAlpha, c1) == 2);
  CHECK(d.order(kBeta, c1) == 1);
  CHECK(d.occurrence_total(c1) == 3);
  CHECK(d.occurrences.at(c2) == 3);
}

TEST_CASE("down report of P_B") {
  const DownReport d = down_report(fixtures::population_b());
  CHECK(d.class_successors.at(c1) == std::set<ClassId>{c2});
  CHECK(d.class_terminals.at(c1) == std::set<TerminalLabel>{{"f2", 0}});
  CHECK(d.order(c1, c2) == 1);
  CHECK(d.terminal_count(c1) == 1);
  CHECK(d.class_successors.at(c2) == std::set<ClassId>{c1});
  CHECK(d.class_terminals.at(c2) == std::set<TerminalLabel>{{"f1", 0}});
  CHECK(d.order(c2, c1) == 1);
  CHECK(d.terminal_count(c2) == 1);
}

TEST_CASE("Order is zero for absent classes and non-successors") {
  const DownReport d = down_report(fixtures::population_a());
  CHECK(d.order(c5, c1) == 0);
  CHECK(d.order(c2, c1) == 0);
  CHECK(d.order(kAlpha, c2) == 0);
  CHECK(d.order(ActionLabel{"gamma"}, c1) == 0);
}

TEST_CASE("limiting frequencies on the fixtures") {
  const Population a = fixtures::population_a();
  const Population b = fixtures::population_b();
  CHECK(limiting_frequency(a, S("alpha,1,2,f1")) == Rational(2, 9));
  CHECK(limiting_frequency(a, S("#")) == 1);
  CHECK(limiting_frequency(b, S("#")) == 1);
  CHECK(limiting_frequency(a, S("alpha,5,#")) == 0);
  CHECK(limiting_frequency(b, S("alpha,1,2,f1")) == Rational(1, 8));
  CHECK(limiting_frequency(a, S("alpha,1,#")) == Rational(2, 3));
  CHECK(limiting_frequency(a, S("alpha,1,2,#")) == Rational(2, 3));
  CHECK(limiting_frequency(a, S("alpha,1,f1")) == 0);
  CHECK(limiting_frequency(a, S("alpha,1,2,f9")) == 0);
  CHECK(limiting_frequency(b, S("beta,2,1,f2")) == Rational(1, 8));
  CHECK(limiting_frequency(b, S("beta,2,f1")) == Rational(1, 4));
}

TEST_CASE("schemata without classes use action counts") {
  const Population p = make_population({
      Rollout{kAlpha, {}, {"f1", 0}},
      Rollout{kAlpha, {{c1, {"a", 0}}}, {"f2", 0}},
      Rollout{kBeta, {}, {"f3", 0}},
      Rollout{kAlpha, {}, {"f1", 1}},
  });
  CHECK(limiting_frequency(p, S("alpha,#")) == Rational(3, 4));
  CHECK(limiting_frequency(p, S("alpha,f1")) == Rational(2, 4));
  CHECK(limiting_frequency(p, S("alpha,f2")) == 0);
  CHECK(limiting_frequency(p, S("beta,f3")) == Rational(1, 4));
}

TEST_CASE("terminal tails count inflated copies") {
  const Population p = inflate(fixtures::population_b(), 3);
  CHECK(limiting_frequency(p, S("alpha,1,2,f1")) == Rational(1, 8));
  CHECK(limiting_frequency(inflate(fixtures::population_a(), 2), S("alpha,1,2,f1")) == Rational(2, 9));
}

TEST_CASE("frequency children") {
  const Population a = fixtures::population_a();
  const Population b = fixtures::population_b();
  CHECK(frequency_children(a, S("alpha,1,#")) == std::map<Schema, Rational>{{S("alpha,1,2,#"), Rational(2, 3)}});
  CHECK(frequency_children(b, S("alpha,1,#")) ==
        std::map<Schema, Rational>{{S("alpha,1,2,#"), Rational(1, 4)}, {S("alpha,1,f2"), Rational(1, 4)}});
  CHECK(frequency_children(a, S("alpha,1,2,#")) == std::map<Schema, Rational>{{S("alpha,1,2,f1"), Rational(2, 9)},
                                                                              {S("alpha,1,2,f2"), Rational(2, 9)},
                                                                              {S("alpha,1,2,f3"), Rational(2, 9)}});
  CHECK(frequency_children(a, S("#")) ==
        std::map<Schema, Rational>{{S("alpha,#"), Rational(2, 3)}, {S("beta,#"), Rational(1, 3)}});
  CHECK(frequency_children(a, S("alpha,5,#")).empty());
  CHECK_THROWS_AS(frequency_children(a, S("alpha,1,2,f1")), std::invalid_argument);
}

TEST_CASE("inflated terminal copies merge into one child") {
  const auto children = frequency_children(inflate(fixtures::population_a(), 2), S("alpha,1,2,#"));
  CHECK(children.size() == 3);
  CHECK(children.at(S("alpha,1,2,f2")) == Rational(2, 9));
}

TEST_CASE("report identities on random populations") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 500; ++n) {
    const Population p = fixtures::random_population(rng, {});
    const DownReport d = down_report(p);
    std::size_t action_total = 0, terminal_total = 0, stateless = 0;
    for (const auto& [key, count] : d.action_order) action_total += count;
    for (const auto& [i, occ] : d.occurrences) {
      terminal_total += d.terminal_count(i);
      CHECK(d.occurrence_total(i) == occ);
    }
    for (const auto& r : p.rollouts()) stateless += r.states.empty() ? 1 : 0;
    CHECK(action_total + stateless == p.size());
    CHECK(terminal_total + stateless == p.size());

    Rational by_action = 0;
    for (const auto& [a, count] : d.action_rollouts) {
      Rational sum = 0;
      for (ClassId j : d.action_successors.contains(a) ? d.action_successors.at(a) : std::set<ClassId>{}) {
        sum += limiting_frequency(d, Schema::open(a, {j}));
      }
      const Rational direct = limiting_frequency(d, Schema::open(a, {})) - sum;
      std::size_t a_stateless = 0;
      for (const auto& r : p.rollouts()) a_stateless += (r.action == a && r.states.empty()) ? 1 : 0;
      CHECK(direct == Rational(BigInt(a_stateless), BigInt(p.size())));
      by_action += limiting_frequency(d, Schema::open(a, {}));
    }
    CHECK(by_action == 1);
  }
}

TEST_CASE("frequencies are bounded and terminal tails never exceed their prefix") {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 200; ++n) {
    const Population p = fixtures::random_population(rng, {});
    const DownReport d = down_report(p);
    for (const auto& r : p.rollouts()) {
      std::vector<ClassId> classes;
      for (const auto& s : r.states) {
        classes.push_back(s.cls);
        const Schema open = Schema::open(r.action, classes);
        const Rational f = limiting_frequency(d, open);
        CHECK(f >= 0);
        CHECK(f <= 1);
        for (const auto& [child, g] : frequency_children(d, open)) CHECK(g <= f);
      }
    }
  }
}

TEST_CASE("flow conservation on random populations") {
  std::mt19937_64 rng(99);
  fixtures::RandomPopulationParams params;
  params.max_height = 4;
  for (int n = 0; n < 200; ++n) {
    const Population p = fixtures::random_population(rng, params);
    const DownReport d = down_report(p);
    std::vector<Schema> frontier{Schema::root()};
    while (!frontier.empty()) {
      const Schema h = frontier.back();
      frontier.pop_back();
      Rational sum = 0;
      for (const auto& [child, f] : frequency_children(d, h)) {
        sum += f;
        if (child.is_open() && child.classes().size() < 5) frontier.push_back(child);
      }
      CHECK(sum == limiting_frequency(d, h));
    }
  }
}

TEST_CASE("the report is invariant under crossover") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 100; ++n) {
    const Population p = fixtures::random_population(rng, {});
    const DownReport d = down_report(p);
    for (const auto& g : generator_index(p)) CHECK(down_report(apply(p, g)) == d);
  }
}
