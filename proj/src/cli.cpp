#include "geiringer/cli.hpp"

#include "geiringer/digraph.hpp"
#include "geiringer/envsim.hpp"
#include "geiringer/io.hpp"
#include "geiringer/recombination.hpp"
#include "geiringer/statistics.hpp"
#include "geiringer/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <iostream>
#include <optional>
#include <thread>

namespace geiringer::cli {

namespace {

constexpr int kDecimals = 12;

struct Options {
  std::string pop;
  std::string env;
  std::vector<std::string> schemata;
  std::string schemata_file;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> walks;
  std::optional<std::uint64_t> seed;
  double identity_prob = TransformDistribution::kDefaultIdentityProbability;
  std::optional<std::uint64_t> cap;
  unsigned workers = 1;
  unsigned verify_workers = 0;
  std::string out;
  std::vector<std::string> only;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Schema> load_schemata(const Options& o) {
  std::vector<std::string> texts = o.schemata;
  if (!o.schemata_file.empty()) {
    const Json list = read_json_file(o.schemata_file);
    if (!list.is_array()) throw ParseError(o.schemata_file + ": expected a JSON array of schema strings");
    for (const auto& item : list) {
      if (!item.is_string()) throw ParseError(o.schemata_file + ": expected a JSON array of schema strings");
      texts.push_back(item.get<std::string>());
    }
  }
  if (texts.empty()) throw UsageError("at least one --schema or --schemata-file is required");
  std::vector<Schema> out;
  for (const auto& t : texts) out.push_back(parse_schema(t));
  return out;
}

Json header(const std::string& command) { return {{"command", command}, {"tool", kToolVersion}}; }

void emit(const Json& report, const Options& o, std::ostream& out) {
  const std::string text = canonical_dump(report);
  if (o.out.empty()) {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

int run_gen(const Options& o, std::ostream& out, std::ostream& err) {
  const SimConfig cfg = sim_config_from_json(read_json_file(o.env));
  const EnvModel env = make_random_pomdp(cfg);
  const auto sequence = default_action_sequence(env, cfg.rollouts);
  const GeneratedPopulation gen = generate_population(env, sequence, *o.seed);
  emit(to_json(PopulationFile{gen.population, gen.payoffs}), o, out);
  err << "gen: " << gen.population.size() << " rollouts, " << gen.cap_hits << " depth-cap terminals\n";
  return kExitOk;
}

int run_mix(const Options& o, std::ostream& out) {
  const PopulationFile file = read_population_file(o.pop);
  const std::vector<Schema> schemata = load_schemata(o);
  const TransformDistribution mu(file.population, o.identity_prob);
  const ChainTrace trace = run_chain(file.population, *o.steps, mu, schemata, *o.seed);

  Json report = header("mix");
  report["inputs"] = {{"pop", o.pop}, {"seed", *o.seed}, {"steps", *o.steps}, {"identity_prob", o.identity_prob}};
  report["b"] = file.population.size();
  report["rollouts_seen"] = trace.rollouts_seen();
  report["generators"] = mu.generators().size();
  Json rows = Json::object();
  for (std::size_t i = 0; i < schemata.size(); ++i) {
    rows[format_schema(schemata[i])] = {{"count", trace.counts[i]}, {"phi", decimal_string(trace.phi(i), kDecimals)}};
  }
  report["schemata"] = rows;
  emit(report, o, out);
  return kExitOk;
}

int run_limit(const Options& o, std::ostream& out) {
  const PopulationFile file = read_population_file(o.pop);
  const std::vector<Schema> schemata = load_schemata(o);
  const DownReport down = down_report(file.population);

  Json report = header("limit");
  report["inputs"] = {{"pop", o.pop}};
  report["b"] = file.population.size();
  Json rows = Json::object();
  for (const auto& h : schemata) {
    const Rational f = limiting_frequency(down, h);
    rows[format_schema(h)] = {{"frequency", to_string(f)}, {"decimal", decimal_string(f, kDecimals)}};
  }
  report["schemata"] = rows;
  report["down_report"] = to_json(down);
  emit(report, o, out);
  return kExitOk;
}

int run_orbit(const Options& o, std::ostream& out) {
  const PopulationFile file = read_population_file(o.pop);
  const std::vector<Schema> schemata = load_schemata(o);
  const std::size_t cap = o.cap ? static_cast<std::size_t>(*o.cap) : kDefaultOrbitCap;
  const OrbitSet orbit = enumerate_orbit(file.population, cap);
  const DownReport down = down_report(file.population);

  Json report = header("orbit");
  report["inputs"] = {{"pop", o.pop}, {"cap", cap}};
  report["b"] = file.population.size();
  report["representatives"] = orbit.representatives.size();
  report["multiplicity"] = orbit.multiplicity.str();
  report["orbit_size"] = orbit.size.str();
  Json rows = Json::object();
  for (const auto& h : schemata) {
    const Rational f = orbit_frequency(orbit, h);
    rows[format_schema(h)] = {{"orbit_frequency", to_string(f)},
                              {"decimal", decimal_string(f, kDecimals)},
                              {"limiting_frequency", to_string(limiting_frequency(down, h))}};
  }
  report["schemata"] = rows;
  emit(report, o, out);
  return kExitOk;
}

int run_eval(const Options& o, std::ostream& out) {
  const PopulationFile file = read_population_file(o.pop);
  const WeightedDigraph g = build_digraph(file.population);
  for (const auto& t : g.terminals()) {
    if (!file.payoffs.find(t)) throw ParseError("no payoff for terminal '" + t.str() + "'");
  }
  EvaluationOptions eo;
  eo.walks_per_action = *o.walks;
  eo.seed = *o.seed;
  eo.step_cap = o.cap ? *o.cap : kDefaultStepCap;
  eo.workers = o.workers;
  const auto actions = g.actions();
  const EvaluationReport eval = evaluate_actions(g, actions, file.payoffs, eo);

  Json report = header("eval");
  report["inputs"] = {{"pop", o.pop}, {"seed", *o.seed}, {"walks", *o.walks}, {"step_cap", eo.step_cap}};
  Json rows = Json::object();
  for (const auto& a : actions) {
    Json row = Json::object();
    if (auto it = eval.actions.find(a); it != eval.actions.end()) {
      const ActionEvaluation& e = it->second;
      Json hits = Json::object();
      for (const auto& [t, count] : e.terminal_hits) hits[t.str()] = count;
      row = {{"q", e.value.q}, {"n", e.value.n}, {"stddev", e.value.stddev()},
             {"cap_exceeded", e.cap_exceeded}, {"terminal_hits", hits}};
    } else {
      row = {{"q", nullptr}, {"n", 0}, {"stddev", nullptr}, {"cap_exceeded", 0}, {"terminal_hits", Json::object()}};
    }
    try {
      const Rational exact = exact_expected_payoff(g, a, file.payoffs);
      row["exact"] = to_string(exact);
      row["exact_decimal"] = decimal_string(exact, kDecimals);
    } catch (const Unsolvable& e) {
      row["exact"] = nullptr;
      row["exact_error"] = e.what();
    }
    rows[a.name] = row;
  }
  report["actions"] = rows;
  emit(report, o, out);
  return kExitOk;
}

int run_verify(const Options& o, std::ostream& out) {
  VerifyOptions vo;
  if (o.seed) vo.seed = *o.seed;
  vo.workers = o.verify_workers;
  for (const auto& id : o.only) {
    const auto& checks = all_checks();
    if (std::none_of(checks.begin(), checks.end(), [&](const Check& c) { return c.id == id; })) {
      throw UsageError("unknown check id '" + id + "'");
    }
  }
  const auto results = run_checks(o.only, vo, [&](const CriterionResult& r) { out << format_result(r) << std::endl; });
  std::size_t failed = 0;
  Json rows = Json::array();
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  if (!o.out.empty()) {
    Json report = header("verify");
    report["inputs"] = {{"seed", vo.seed}};
    report["checks"] = rows;
    write_text_file(o.out, canonical_dump(report));
  }
  out << (results.size() - failed) << "/" << results.size() << " checks passed\n";
  if (failed > 0) throw VerificationFailed(std::to_string(failed) + " check(s) failed");
  return kExitOk;
}

void require(bool present, const char* flag) {
  if (!present) throw UsageError(std::string(flag) + " is required");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rollout schemata, recombination chains and bug-walk evaluation", "geiringer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Options o;

  auto pop = [&](CLI::App* c) { c->add_option("--pop", o.pop, "Population file (JSON)")->required(); };
  auto schemata = [&](CLI::App* c) {
    c->add_option("--schema", o.schemata, "Schema such as alpha,1,2,f1 or alpha,1,# (repeatable)");
    c->add_option("--schemata-file", o.schemata_file, "JSON array of schema strings");
  };
  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed"); };
  auto output = [&](CLI::App* c) { c->add_option("--out", o.out, "Report path (default: stdout)"); };

  CLI::App* gen = app.add_subcommand("gen", "Simulate a population from an environment config");
  gen->add_option("--env", o.env, "Environment config (JSON)")->required();
  seed(gen);
  output(gen);

  CLI::App* mix = app.add_subcommand("mix", "Run the recombination chain and report running frequencies");
  pop(mix);
  schemata(mix);
  mix->add_option("--steps", o.steps, "Chain steps T");
  seed(mix);
  mix->add_option("--identity-prob", o.identity_prob, "Probability of the identity transform")
      ->check(CLI::Range(0.0, 1.0));
  output(mix);

  CLI::App* limit = app.add_subcommand("limit", "Closed-form limiting frequencies");
  pop(limit);
  schemata(limit);
  output(limit);

  CLI::App* orbit = app.add_subcommand("orbit", "Exact orbit means of schema frequencies");
  pop(orbit);
  schemata(orbit);
  orbit->add_option("--cap", o.cap, "Maximum number of orbit representatives");
  output(orbit);

  CLI::App* eval = app.add_subcommand("eval", "Bug-walk action evaluation with the exact oracle");
  pop(eval);
  eval->add_option("--walks", o.walks, "Walks per action");
  seed(eval);
  eval->add_option("--cap", o.cap, "Step cap per walk");
  eval->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  output(eval);

  CLI::App* verify = app.add_subcommand("verify", "Run the invariant and acceptance suite");
  seed(verify);
  verify->add_option("--workers", o.verify_workers, "Worker threads for walk checks (0: all cores)");
  verify->add_option("--only", o.only, "Check ids to run (repeatable)");
  output(verify);

  std::vector<const char*> argv{"geiringer"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  int code = kExitOk;
  try {
    if (name == "gen") {
      require(o.seed.has_value(), "--seed");
      code = run_gen(o, out, err);
    } else if (name == "mix") {
      require(o.seed.has_value(), "--seed");
      require(o.steps.has_value(), "--steps");
      code = run_mix(o, out);
    } else if (name == "limit") {
      code = run_limit(o, out);
    } else if (name == "orbit") {
      code = run_orbit(o, out);
    } else if (name == "eval") {
      require(o.seed.has_value(), "--seed");
      require(o.walks.has_value(), "--walks");
      code = run_eval(o, out);
    } else {
      code = run_verify(o, out);
    }
  } catch (const UsageError& e) {
    err << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const SyntaxError& e) {
    err << name << ": schema syntax error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << name << ": invalid population\n";
    for (const auto& v : e.violations()) err << "  " << to_string(v.kind) << ": " << v.detail << "\n";
    return kExitValidation;
  } catch (const OrbitCapExceeded& e) {
    err << name << ": " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const VerificationFailed& e) {
    err << name << ": " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << "\n";
    return kExitValidation;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  err << name << ": " << elapsed.count() << " s\n";
  return code;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace geiringer::cli
