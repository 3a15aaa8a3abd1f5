#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geiringer/core_model.hpp"
#include "geiringer/fixtures.hpp"

using namespace geiringer;

namespace {

Rollout rollout(const char* action, std::vector<std::pair<std::uint32_t, const char*>> states, const char* terminal) {
  Rollout r{{action}, {}, {terminal, 0}};
  for (auto [cls, tag] : states) r.states.push_back({ClassId{cls}, {tag, 0}});
  return r;
}

std::vector<Violation> violations_of(std::vector<Rollout> rollouts) {
  auto result = validate_population(std::move(rollouts));
  REQUIRE(std::holds_alternative<std::vector<Violation>>(result));
  return std::get<std::vector<Violation>>(result);
}

}  // namespace

TEST_CASE("class ids start at 1") {
  CHECK_THROWS_AS(ClassId{0}, std::invalid_argument);
  CHECK(ClassId{3}.value == 3);
}

TEST_CASE("terminal labels carry copy indices in text form") {
  CHECK(TerminalLabel::parse("f1") == TerminalLabel{"f1", 0});
  CHECK(TerminalLabel::parse("f1:3") == TerminalLabel{"f1", 3});
  CHECK(TerminalLabel::parse("a:b") == TerminalLabel{"a:b", 0});
  CHECK(TerminalLabel::parse(":4") == TerminalLabel{":4", 0});
  CHECK(TerminalLabel{"f2", 7}.str() == "f2:7");
  CHECK(TerminalLabel{"f2", 0}.str() == "f2");
  CHECK(to_string(StateTag{"a", 2}) == "a:2");
}

TEST_CASE("validation accepts the canonical fixtures") {
  CHECK(fixtures::population_a().size() == 3);
  CHECK(fixtures::population_b().size() == 2);
  CHECK(is_homologous(fixtures::population_a()));
  CHECK_FALSE(is_homologous(fixtures::population_b()));
}

TEST_CASE("duplicate states are reported with their rollouts") {
  const auto v = violations_of({rollout("alpha", {{1, "a"}, {2, "a"}}, "f1"), rollout("beta", {{1, "a"}}, "f2")});
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::DuplicateState);
  CHECK(v[0].rollouts == std::vector<std::size_t>{0, 1});
}

TEST_CASE("a state repeated inside one rollout is a duplicate") {
  const auto v = violations_of({rollout("alpha", {{1, "a"}, {1, "a"}}, "f1")});
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::DuplicateState);
  CHECK(v[0].rollouts == std::vector<std::size_t>{0, 0});
}

TEST_CASE("equal tags in different classes are distinct states") {
  CHECK_NOTHROW(make_population({rollout("alpha", {{1, "a"}, {2, "a"}}, "f1")}));
}

TEST_CASE("duplicate terminals and empty labels are reported") {
  const auto v = violations_of({rollout("alpha", {{1, "a"}}, "f1"), rollout("", {{1, "b"}}, "f1")});
  REQUIRE(v.size() == 2);
  CHECK(v[0].kind == ViolationKind::EmptyLabel);
  CHECK(v[0].rollouts == std::vector<std::size_t>{1});
  CHECK(v[1].kind == ViolationKind::DuplicateTerminal);
  CHECK(v[1].rollouts == std::vector<std::size_t>{0, 1});
}

TEST_CASE("empty population is rejected") {
  const auto v = violations_of({});
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::EmptyPopulation);
  CHECK_THROWS_AS(make_population({}), ValidationError);
}

TEST_CASE("stateless rollouts are valid") {
  const Population p = make_population({rollout("alpha", {}, "f1")});
  CHECK(p[0].height() == 0);
}

TEST_CASE("schema counts on the fixtures") {
  const Population a = fixtures::population_a();
  const Population b = fixtures::population_b();
  CHECK(schema_count(Schema::root(), a) == 3);
  CHECK(schema_count(Schema::open({"alpha"}, {ClassId{1}}), a) == 2);
  CHECK(schema_count(Schema::open({"beta"}, {ClassId{2}}), b) == 1);
  CHECK(schema_count(Schema::closed({"alpha"}, {ClassId{1}, ClassId{2}}, "f1"), a) == 1);
  CHECK(schema_count(Schema::closed({"alpha"}, {ClassId{1}}, "f1"), a) == 0);
  CHECK(schema_count(Schema::open({"gamma"}, {}), a) == 0);
}

TEST_CASE("'#' matches zero further states") {
  const Rollout r = rollout("alpha", {{1, "a"}, {2, "a"}}, "f1");
  CHECK(schema_match(Schema::open({"alpha"}, {ClassId{1}, ClassId{2}}), r));
  CHECK(schema_match(Schema::open({"alpha"}, {}), r));
  CHECK_FALSE(schema_match(Schema::open({"alpha"}, {ClassId{1}, ClassId{2}, ClassId{3}}), r));
  CHECK(schema_match(Schema::open({"alpha"}, {}), rollout("alpha", {}, "f9")));
  CHECK(schema_match(Schema::closed({"alpha"}, {}, "f9"), rollout("alpha", {}, "f9")));
}

TEST_CASE("schema match is monotone under '#' extension") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 300; ++n) {
    const Population p = fixtures::random_population(rng, {});
    for (const auto& r : p.rollouts()) {
      std::vector<ClassId> classes;
      for (const auto& s : r.states) classes.push_back(s.cls);
      const Schema exact = Schema::closed(r.action, classes, r.terminal.name);
      REQUIRE(schema_match(exact, r));
      for (std::size_t j = 0; j <= classes.size(); ++j) {
        CHECK(schema_match(Schema::open(r.action, {classes.begin(), classes.begin() + static_cast<long>(j)}), r));
      }
    }
  }
}

TEST_CASE("inflation by one is the identity") {
  CHECK(inflate(fixtures::population_b(), 1) == fixtures::population_b());
  CHECK_THROWS_AS(inflate(fixtures::population_b(), 0), std::invalid_argument);
}

TEST_CASE("inflation keeps copies contiguous and labels distinct") {
  const Population p = inflate(fixtures::population_b(), 3);
  REQUIRE(p.size() == 6);
  CHECK(p[0].terminal == TerminalLabel{"f1", 0});
  CHECK(p[1].terminal == TerminalLabel{"f1", 1});
  CHECK(p[2].terminal == TerminalLabel{"f1", 2});
  CHECK(p[4].states[0].tag == StateTag{"b", 1});
  CHECK(std::holds_alternative<Population>(validate_population(p.rollouts())));
  const Population twice = inflate(inflate(fixtures::population_b(), 2), 2);
  CHECK(std::holds_alternative<Population>(validate_population(twice.rollouts())));
}

TEST_CASE("schema counts scale with inflation") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) {
    const Population p = fixtures::random_population(rng, {});
    for (std::uint32_t m = 1; m <= 4; ++m) {
      const Population q = inflate(p, m);
      REQUIRE(std::holds_alternative<Population>(validate_population(q.rollouts())));
      for (const auto& r : p.rollouts()) {
        std::vector<ClassId> classes;
        for (const auto& s : r.states) classes.push_back(s.cls);
        const Schema open = Schema::open(r.action, classes);
        const Schema closed = Schema::closed(r.action, classes, r.terminal.name);
        CHECK(schema_count(open, q) == m * schema_count(open, p));
        CHECK(schema_count(closed, q) == m * schema_count(closed, p));
      }
      CHECK(schema_count(Schema::root(), q) == m * p.size());
    }
  }
}

TEST_CASE("payoff lookup falls back to the base label") {
  PayoffMap payoffs;
  payoffs.set({"f1", 0}, Rational(3, 2));
  CHECK(payoffs.at({"f1", 4}) == Rational(3, 2));
  CHECK(payoffs.find({"f2", 0}) == nullptr);
  CHECK_THROWS_AS(payoffs.at({"f2", 1}), std::out_of_range);
  payoffs.set({"f1", 4}, Rational(7));
  CHECK(payoffs.at({"f1", 4}) == Rational(7));
}

TEST_CASE("random homologous populations are homologous") {
  std::mt19937_64 rng(3);
  fixtures::RandomPopulationParams params;
  params.homologous = true;
  for (int n = 0; n < 500; ++n) CHECK(is_homologous(fixtures::random_population(rng, params)));
}
