#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geiringer/cli.hpp"
#include "geiringer/io.hpp"

#include <sstream>

using namespace geiringer;

namespace {

const std::string kFixtures{GEIRINGER_FIXTURE_DIR};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return kFixtures + "/" + name; }

}  // namespace

TEST_CASE("limit reports the closed form") {
  const Run r = run({"limit", "--pop", fixture("P_A.json"), "--schema", "alpha,1,2,f1", "--schema", "#"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("command") == "limit");
  CHECK(j.at("schemata").at("alpha,1,2,f1").at("frequency") == "2/9");
  CHECK(j.at("schemata").at("#").at("frequency") == "1/1");
  CHECK(j.at("b") == 3);
}

TEST_CASE("a schemata file is accepted") {
  const Run r = run({"limit", "--pop", fixture("P_B.json"), "--schemata-file", fixture("schemata.json")});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("schemata").size() == 5);
  CHECK(j.at("schemata").at("beta,2,1,f2").at("frequency") == "1/8");
}

TEST_CASE("orbit reports exact means and honors the cap") {
  const Run r = run({"orbit", "--pop", fixture("P_A.json"), "--schema", "alpha,1,2,f1"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("orbit_size") == "216");
  CHECK(j.at("representatives") == 6);
  CHECK(j.at("schemata").at("alpha,1,2,f1").at("orbit_frequency") == "2/9");

  const Run capped = run({"orbit", "--pop", fixture("P_A.json"), "--schema", "#", "--cap", "2"});
  CHECK(capped.code == cli::kExitCapExceeded);
  CHECK(capped.out.empty());
}

TEST_CASE("eval is byte-identical across runs and worker counts") {
  const std::vector<std::string> base{"eval", "--pop", fixture("P_B.json"), "--walks", "20000", "--seed", "5"};
  const Run first = run(base);
  REQUIRE(first.code == cli::kExitOk);
  auto more = base;
  more.insert(more.end(), {"--workers", "3"});
  const Run second = run(more);
  CHECK(first.out == second.out);
  const Json j = Json::parse(first.out);
  CHECK(j.at("actions").at("alpha").at("exact") == "1/3");
  CHECK(j.at("actions").at("beta").at("exact") == "2/3");
  CHECK(j.at("actions").at("alpha").at("n") == 20000);
}

TEST_CASE("mix reports running frequencies") {
  const Run r = run({"mix", "--pop", fixture("P_A.json"), "--schema", "alpha,1,#", "--steps", "1000", "--seed", "3"});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.at("schemata").at("alpha,1,#").at("count") == 2002);
  CHECK(j.at("rollouts_seen") == 3003);
  CHECK(run({"mix", "--pop", fixture("P_A.json"), "--schema", "alpha,1,#", "--steps", "1000", "--seed", "3"}).out ==
        r.out);
}

TEST_CASE("gen writes a valid population") {
  const Run r = run({"gen", "--env", fixture("env_small.json"), "--seed", "2"});
  REQUIRE(r.code == cli::kExitOk);
  const PopulationFile file = population_from_json(Json::parse(r.out));
  CHECK(file.population.size() == 4);
  for (const auto& row : file.population.rollouts()) CHECK(file.payoffs.find(row.terminal) != nullptr);
  CHECK(run({"gen", "--env", fixture("env_small.json"), "--seed", "2"}).out == r.out);
}

TEST_CASE("invalid populations exit 2 and name the violation") {
  const Run dup = run({"mix", "--pop", fixture("dup_state.json"), "--schema", "#", "--steps", "10", "--seed", "1"});
  CHECK(dup.code == cli::kExitValidation);
  CHECK(dup.err.find("DuplicateState") != std::string::npos);
  const Run term = run({"limit", "--pop", fixture("dup_terminal.json"), "--schema", "#"});
  CHECK(term.code == cli::kExitValidation);
  CHECK(term.err.find("DuplicateTerminal") != std::string::npos);
  CHECK(run({"limit", "--pop", fixture("truncated.json"), "--schema", "#"}).code == cli::kExitValidation);
  CHECK(run({"limit", "--pop", fixture("nope.json"), "--schema", "#"}).code == cli::kExitValidation);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"limit", "--schema", "#"}).code == cli::kExitUsage);
  CHECK(run({"limit", "--pop", fixture("P_A.json")}).code == cli::kExitUsage);
  CHECK(run({"limit", "--pop", fixture("P_A.json"), "--schema", "alpha,x,#"}).code == cli::kExitUsage);
  CHECK(run({"mix", "--pop", fixture("P_A.json"), "--schema", "#", "--seed", "1"}).code == cli::kExitUsage);
  CHECK(run({"eval", "--pop", fixture("P_A.json"), "--walks", "10"}).code == cli::kExitUsage);
  CHECK(run({"eval", "--pop", fixture("P_A.json"), "--walks", "10", "--seed", "1", "--workers", "0"}).code ==
        cli::kExitUsage);
  CHECK(run({"verify", "--only", "99"}).code == cli::kExitUsage);
  CHECK(run({"--version"}).code == cli::kExitOk);
}

TEST_CASE("verify runs a selected check") {
  const Run r = run({"verify", "--only", "9"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.starts_with("PASS 9 "));
  CHECK(r.out.find("1/1 checks passed") != std::string::npos);
}
