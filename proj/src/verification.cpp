#include "geiringer/verification.hpp"

#include "geiringer/cli.hpp"
#include "geiringer/digraph.hpp"
#include "geiringer/envsim.hpp"
#include "geiringer/fixtures.hpp"
#include "geiringer/io.hpp"
#include "geiringer/recombination.hpp"
#include "geiringer/statistics.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unistd.h>

namespace geiringer {

namespace {

using fixtures::RandomPopulationParams;

std::uint64_t stream_seed(const VerifyOptions& o, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

unsigned worker_count(const VerifyOptions& o) {
  return o.workers != 0 ? o.workers : std::max(1u, std::thread::hardware_concurrency());
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

Schema parse(const char* text) {
  return parse_schema(text);
}

/// Records the first failure and counts all of them.
struct Tally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first;

  void check(bool ok, const std::function<std::string()>& what) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first = what();
  }
  std::string summary(const std::string& unit) const {
    std::string s = std::to_string(cases) + " " + unit + ", " + std::to_string(failures) + " failures";
    if (failures > 0) s += "; first: " + first;
    return s;
  }
};

std::string describe(const Population& p) {
  std::string out;
  for (const auto& r : p.rollouts()) {
    out += "(" + r.action.name;
    for (const auto& s : r.states) out += ",(" + std::to_string(s.cls.value) + "," + to_string(s.tag) + ")";
    out += "," + r.terminal.str() + ")";
  }
  return out;
}

std::string describe(const Transform& t) {
  if (t.kind == TransformKind::Identity) return "identity";
  return to_string(t.kind) + "[" + std::to_string(t.cls.value) + ";" + to_string(t.first) + "," +
         to_string(t.second) + "]";
}

std::vector<TaggedState> state_multiset(const Population& p) {
  std::vector<TaggedState> out;
  for (const auto& r : p.rollouts()) out.insert(out.end(), r.states.begin(), r.states.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TerminalLabel> terminal_multiset(const Population& p) {
  std::vector<TerminalLabel> out;
  for (const auto& r : p.rollouts()) out.push_back(r.terminal);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ActionLabel> action_sequence(const Population& p) {
  std::vector<ActionLabel> out;
  for (const auto& r : p.rollouts()) out.push_back(r.action);
  return out;
}

std::string population_key(const std::vector<Rollout>& rollouts) {
  std::string key;
  for (const auto& r : rollouts) {
    key += r.action.name;
    for (const auto& s : r.states) key += "," + std::to_string(s.cls.value) + "." + to_string(s.tag);
    key += ">" + r.terminal.str() + ";";
  }
  return key;
}

/// Every tagged population reachable by χ and ν, without any quotient.
std::vector<std::vector<Rollout>> full_orbit(const Population& p0, std::size_t cap) {
  const auto gens = generator_index(p0);
  std::vector<std::vector<Rollout>> members{p0.rollouts()};
  std::unordered_map<std::string, std::size_t> seen{{population_key(p0.rollouts()), 0}};
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (const auto& g : gens) {
      std::vector<Rollout> next = members[head];
      apply_in_place(next, g);
      if (!seen.emplace(population_key(next), members.size()).second) continue;
      if (members.size() >= cap) throw OrbitCapExceeded(cap);
      members.push_back(std::move(next));
    }
  }
  return members;
}

std::set<ActionLabel> actions_of(const Population& p) {
  std::set<ActionLabel> out;
  for (const auto& r : p.rollouts()) out.insert(r.action);
  return out;
}

std::set<ClassId> classes_of(const Population& p) {
  std::set<ClassId> out;
  for (const auto& r : p.rollouts()) {
    for (const auto& s : r.states) out.insert(s.cls);
  }
  return out;
}

std::set<std::string> terminal_names_of(const Population& p) {
  std::set<std::string> out;
  for (const auto& r : p.rollouts()) out.insert(r.terminal.name);
  return out;
}

/// ROOT plus every (action, classes..., tail) with up to `height` classes.
/// Includes one absent action, one absent class and one absent terminal so
/// the zero conventions are exercised.
std::vector<Schema> schemata_up_to(const Population& p, std::size_t height, bool open_only) {
  std::set<ActionLabel> actions = actions_of(p);
  actions.insert({"omega"});
  std::vector<ClassId> classes;
  for (ClassId c : classes_of(p)) classes.push_back(c);
  classes.push_back(ClassId{classes.empty() ? 1u : classes.back().value + 1});
  std::set<std::string> terminals = terminal_names_of(p);
  terminals.insert("zz");

  std::vector<Schema> out{Schema::root()};
  std::vector<std::vector<ClassId>> layer{{}};
  for (std::size_t k = 0; k <= height; ++k) {
    for (const auto& seq : layer) {
      for (const auto& a : actions) {
        out.push_back(Schema::open(a, seq));
        if (open_only) continue;
        for (const auto& f : terminals) out.push_back(Schema::closed(a, seq, f));
      }
    }
    std::vector<std::vector<ClassId>> grown;
    for (const auto& seq : layer) {
      for (ClassId c : classes) {
        auto longer = seq;
        longer.push_back(c);
        grown.push_back(std::move(longer));
      }
    }
    layer = std::move(grown);
  }
  return out;
}

RandomPopulationParams mixed_params() {
  RandomPopulationParams params;
  params.max_rollouts = 5;
  params.max_height = 4;
  params.max_classes = 3;
  params.actions = 2;
  return params;
}

PayoffMap payoffs(std::initializer_list<std::pair<const char*, int>> values) {
  PayoffMap map;
  for (auto [name, v] : values) map.set({name, 0}, Rational(v));
  return map;
}

CriterionResult involution(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 1));
  Tally tally;
  for (int n = 0; n < 1000; ++n) {
    const Population p = fixtures::random_population(rng, mixed_params());
    const auto states = state_multiset(p);
    const auto terminals = terminal_multiset(p);
    const auto actions = action_sequence(p);
    for (const auto& g : generator_index(p)) {
      const Population q = apply(p, g);
      const bool valid = std::holds_alternative<Population>(validate_population(q.rollouts()));
      const bool ok = apply(q, g) == p && q.size() == p.size() && state_multiset(q) == states &&
                      terminal_multiset(q) == terminals && action_sequence(q) == actions && valid;
      tally.check(ok, [&] { return describe(g) + " on " + describe(p); });
    }
  }
  return {"", "", tally.failures == 0, "1000 populations, " + tally.summary("(population, generator) pairs"), 0};
}

CriterionResult stat_invariance(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 2));
  Tally tally;
  for (int n = 0; n < 200; ++n) {
    const Population p = fixtures::random_population(rng, mixed_params());
    const DownReport expected = down_report(p);
    const auto gens = generator_index(p);
    std::vector<Rollout> current = p.rollouts();
    bool ok = true;
    for (int step = 0; step < 100 && ok; ++step) {
      apply_in_place(current, gens[std::uniform_int_distribution<std::size_t>(0, gens.size() - 1)(rng)]);
      ok = down_report(current) == expected;
    }
    tally.check(ok, [&] { return describe(p); });
  }
  return {"", "", tally.failures == 0, tally.summary("100-step sequences"), 0};
}

CriterionResult homologous_exactness(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 3));
  RandomPopulationParams params;
  params.max_rollouts = 4;
  params.max_height = 3;
  params.max_classes = 4;
  params.homologous = true;

  std::vector<Population> pops{fixtures::population_a()};
  while (pops.size() < 31) pops.push_back(fixtures::random_population(rng, params));

  Tally tally;
  std::size_t not_homologous = 0;
  for (const auto& p : pops) {
    if (!is_homologous(p)) ++not_homologous;
    const OrbitSet orbit = enumerate_orbit(p);
    const DownReport down = down_report(p);
    for (const auto& h : schemata_up_to(p, 3, false)) {
      const Rational exact = orbit_frequency(orbit, h);
      const Rational closed = limiting_frequency(down, h);
      tally.check(exact == closed, [&] {
        return format_schema(h) + " on " + describe(p) + ": orbit " + to_string(exact) + ", closed form " +
               to_string(closed);
      });
    }
  }
  const Schema h = parse("alpha,1,2,f1");
  const OrbitSet orbit_a = enumerate_orbit(fixtures::population_a());
  const Rational orbit_value = orbit_frequency(orbit_a, h);
  const Rational closed_value = limiting_frequency(fixtures::population_a(), h);
  const bool anchor = orbit_value == Rational(2, 9) && closed_value == Rational(2, 9);
  return {"", "", tally.failures == 0 && not_homologous == 0 && anchor,
          "P_A (alpha,1,2,f1): orbit " + to_string(orbit_value) + ", closed form " + to_string(closed_value) +
              "; " + std::to_string(pops.size()) + " populations, " + tally.summary("schemata"),
          0};
}

CriterionResult chain_convergence(const VerifyOptions& o) {
  const Population p = fixtures::population_a();
  const std::uint64_t steps = 100'000;
  const std::uint64_t seed = stream_seed(o, 4);
  const TransformDistribution mu(p);
  const Schema target = parse("alpha,1,2,f1");
  const Schema invariant = parse("alpha,1,#");
  const ChainTrace trace = run_chain(p, steps, mu, {target, invariant}, seed);

  // Φ_T(alpha,1,#) = 2/3 for every T holds iff every visited population has 2 matches.
  RecombinationChain chain(p, mu, seed);
  std::uint64_t off = schema_count(invariant, chain.current()) == 2 ? 0 : 1;
  std::uint64_t target_count = schema_count(target, chain.current());
  for (std::uint64_t t = 0; t < steps; ++t) {
    chain.step();
    off += schema_count(invariant, chain.current()) == 2 ? 0 : 1;
    target_count += schema_count(target, chain.current());
  }
  const double phi = to_double(trace.phi(0));
  const bool ok = std::abs(phi - 2.0 / 9.0) <= 0.02 && trace.phi(1) == Rational(2, 3) && off == 0 &&
                  target_count == trace.counts[0];
  return {"", "", ok,
          "Phi_T(alpha,1,2,f1) = " + decimal_string(trace.phi(0), 6) + " (|diff| " + fmt(std::abs(phi - 2.0 / 9.0)) +
              " vs 2/9); Phi_T(alpha,1,#) = " + to_string(trace.phi(1)) + ", off at " + std::to_string(off) +
              " of " + std::to_string(steps + 1) + " times",
          0};
}

struct ChiSquare {
  double statistic = 0;
  double p_value = 0;
  std::uint64_t samples = 0;
};

ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(counts.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat)), total};
}

/// Exact second-largest eigenvalue modulus of the μ chain restricted to the orbit.
double second_eigenvalue(const std::vector<std::vector<Rollout>>& members, const TransformDistribution& mu) {
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t k = 0; k < members.size(); ++k) index[population_key(members[k])] = static_cast<Eigen::Index>(k);
  const auto n = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd transition = Eigen::MatrixXd::Identity(n, n) * mu.identity_probability();
  const double share = (1.0 - mu.identity_probability()) / static_cast<double>(mu.generators().size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    for (const auto& g : mu.generators()) {
      std::vector<Rollout> next = members[k];
      apply_in_place(next, g);
      transition(static_cast<Eigen::Index>(k), index.at(population_key(next))) += share;
    }
  }
  // Each generator is an involution, so the matrix is symmetric.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(transition);
  Eigen::VectorXd values = solver.eigenvalues().cwiseAbs();
  std::sort(values.data(), values.data() + values.size(), std::greater<>());
  return values.size() > 1 ? values(1) : 0.0;
}

CriterionResult uniform_stationarity(const VerifyOptions& o) {
  const Population p = fixtures::population_b();
  const auto members = full_orbit(p, 50);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < members.size(); ++k) index[population_key(members[k])] = k;

  const TransformDistribution mu(p);
  const double lambda = second_eigenvalue(members, mu);
  // Thinning stride after which successive samples are correlated by at most 1e-3.
  const auto stride = static_cast<std::uint64_t>(std::max(1.0, std::ceil(std::log(1e-3) / std::log(lambda))));

  const std::uint64_t steps = 1'000'000;
  RecombinationChain chain(p, mu, stream_seed(o, 5));
  std::vector<std::uint64_t> all(members.size(), 0), thinned(members.size(), 0);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    chain.step();
    const std::size_t k = index.at(population_key(chain.current()));
    ++all[k];
    if (t % stride == 0) ++thinned[k];
  }
  const ChiSquare raw = chi_square_uniform(all);
  const ChiSquare test = chi_square_uniform(thinned);
  return {"", "", members.size() <= 50 && test.p_value > 0.001,
          "P_B orbit " + std::to_string(members.size()) + ", |lambda_2| " + fmt(lambda) + ", stride " +
              std::to_string(stride) + ": chi2 " + fmt(test.statistic) + " on " + std::to_string(test.samples) +
              " samples, p = " + fmt(test.p_value) + " (every step: chi2 " + fmt(raw.statistic) + ", p = " +
              fmt(raw.p_value) + ")",
          0};
}

CriterionResult inflation_limit(const VerifyOptions&) {
  const Schema h = parse("alpha,1,2,f1");
  const Rational limit(1, 8);
  std::vector<Rational> gaps;
  std::string detail;
  bool closed_ok = true;
  for (std::uint32_t m = 1; m <= 4; ++m) {
    const Population p = inflate(fixtures::population_b(), m);
    const OrbitSet orbit = enumerate_orbit(p);
    const Rational value = orbit_frequency(orbit, h);
    closed_ok = closed_ok && limiting_frequency(p, h) == limit;
    const Rational gap = value > limit ? Rational(value - limit) : Rational(limit - value);
    gaps.push_back(gap);
    detail += (m > 1 ? "; " : "") + std::string("m=") + std::to_string(m) + ": " + to_string(value) + " (gap " +
              to_string(gap) + ", " + std::to_string(orbit.representatives.size()) + " reps)";
  }
  return {"", "", closed_ok && gaps[3] < gaps[0], detail, 0};
}

struct EvalCase {
  std::string label;
  Population population;
  PayoffMap payoffs;
  std::map<std::string, Rational> expected;
};

std::string evaluate_against_oracle(const EvalCase& c, std::uint64_t walks, std::uint64_t seed, unsigned workers,
                                    Tally& tally) {
  const WeightedDigraph g = build_digraph(c.population);
  EvaluationOptions eo;
  eo.walks_per_action = walks;
  eo.seed = seed;
  eo.workers = workers;
  const auto actions = g.actions();
  const EvaluationReport report = evaluate_actions(g, actions, c.payoffs, eo);
  std::string detail;
  for (const auto& a : actions) {
    const Rational exact = exact_expected_payoff(g, a, c.payoffs);
    if (auto it = c.expected.find(a.name); it != c.expected.end()) {
      tally.check(exact == it->second, [&] { return c.label + " " + a.name + ": exact " + to_string(exact); });
    }
    const ActionEvaluation& e = report.actions.at(a);
    const double se = e.value.stddev() / std::sqrt(static_cast<double>(e.value.n));
    const double diff = std::abs(e.value.q - to_double(exact));
    tally.check(diff <= 3 * se + 1e-12 && e.cap_exceeded == 0 && e.value.n == walks, [&] {
      return c.label + " " + a.name + ": Q " + fmt(e.value.q, 8) + " vs " + to_string(exact) + ", 3SE " + fmt(3 * se);
    });
    detail += (detail.empty() ? "" : ", ") + a.name + " Q=" + fmt(e.value.q, 6) + " exact " + to_string(exact) +
              " (|d|/SE " + fmt(se > 0 ? diff / se : 0.0, 3) + ")";
  }
  return c.label + ": " + detail;
}

CriterionResult evaluator_oracle(const VerifyOptions& o) {
  const std::vector<EvalCase> cases{
      {"P_B", fixtures::population_b(), payoffs({{"f1", 1}, {"f2", 0}}),
       {{"alpha", Rational(1, 3)}, {"beta", Rational(2, 3)}}},
      {"P_A", fixtures::population_a(), payoffs({{"f1", 1}, {"f2", 0}, {"f3", 2}}),
       {{"alpha", Rational(1)}, {"beta", Rational(1)}}},
  };
  Tally tally;
  std::string detail;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    detail += (k ? "; " : "") + evaluate_against_oracle(cases[k], 100'000, stream_seed(o, 70 + k), worker_count(o), tally);
  }
  return {"", "", tally.failures == 0, detail + (tally.failures ? "; " + tally.summary("checks") : ""), 0};
}

CriterionResult flow_conservation(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 8));
  Tally tally;
  for (int n = 0; n < 100; ++n) {
    const Population p = fixtures::random_population(rng, mixed_params());
    const DownReport down = down_report(p);
    for (const auto& h : schemata_up_to(p, 3, true)) {
      Rational sum = 0;
      for (const auto& [child, f] : frequency_children(down, h)) sum += f;
      const Rational parent = limiting_frequency(down, h);
      tally.check(sum == parent, [&] {
        return format_schema(h) + " on " + describe(p) + ": children " + to_string(sum) + ", parent " +
               to_string(parent);
      });
    }
  }
  return {"", "", tally.failures == 0, "100 populations, " + tally.summary("#-tailed schemata"), 0};
}

std::size_t terminal_total(const Population& p) {
  const DownReport d = down_report(p);
  std::size_t sum = 0;
  for (const auto& [i, occ] : d.occurrences) sum += d.terminal_count(i);
  return sum;
}

CriterionResult terminal_identity(const VerifyOptions& o) {
  Tally fixtures_tally;
  const std::vector<std::pair<std::string, Population>> named{
      {"P_A", fixtures::population_a()},
      {"P_B", fixtures::population_b()},
      {"inflate(P_A,3)", inflate(fixtures::population_a(), 3)},
      {"inflate(P_B,4)", inflate(fixtures::population_b(), 4)},
  };
  for (const auto& [label, p] : named) {
    fixtures_tally.check(terminal_total(p) == p.size(), [&] { return label; });
  }
  std::mt19937_64 rng(stream_seed(o, 9));
  RandomPopulationParams params = mixed_params();
  params.allow_stateless = false;
  Tally random_tally;
  for (int n = 0; n < 1000; ++n) {
    const Population p = fixtures::random_population(rng, params);
    random_tally.check(terminal_total(p) == p.size(), [&] { return describe(p); });
  }
  return {"", "", fixtures_tally.failures == 0 && random_tally.failures == 0,
          "fixtures: " + fixtures_tally.summary("populations") + "; random: " + random_tally.summary("populations"),
          0};
}

struct CapturedRun {
  int code = 0;
  std::string err;
};

CapturedRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CriterionResult pipeline_determinism(const VerifyOptions& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("geiringer-pipeline-" + std::to_string(::getpid()) + "-" + std::to_string(o.seed));
  const std::string seed = std::to_string(o.seed);
  const std::vector<std::string> reports{"pop.json", "mix.json", "limit.json", "orbit.json", "eval.json"};

  SimConfig cfg;
  cfg.states = 4;
  cfg.observations = 2;
  cfg.actions = 2;
  cfg.max_branching = 2;
  cfg.depth_cap = 2;
  cfg.rollouts = 4;
  cfg.seed = o.seed;

  auto run = [&](const std::string& workers, std::string& failure) {
    std::map<std::string, std::string> bytes;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto path = [&](const std::string& name) { return (dir / name).string(); };
    write_text_file(path("env.json"), canonical_dump(to_json(cfg)));
    write_text_file(path("schemata.json"),
                    canonical_dump(Json::array({"#", "alpha,#", "beta,#", "alpha,1,#", "alpha,2,#", "beta,1,#",
                                                "beta,2,#", "alpha,1,2,#", "alpha,2,1,#"})));
    const std::vector<std::vector<std::string>> steps{
        {"gen", "--env", path("env.json"), "--seed", seed, "--out", path("pop.json")},
        {"mix", "--pop", path("pop.json"), "--schemata-file", path("schemata.json"), "--steps", "20000", "--seed",
         seed, "--out", path("mix.json")},
        {"limit", "--pop", path("pop.json"), "--schemata-file", path("schemata.json"), "--out", path("limit.json")},
        {"orbit", "--pop", path("pop.json"), "--schemata-file", path("schemata.json"), "--cap", "200000", "--out",
         path("orbit.json")},
        {"eval", "--pop", path("pop.json"), "--walks", "20000", "--seed", seed, "--workers", workers, "--out",
         path("eval.json")},
    };
    for (const auto& args : steps) {
      const CapturedRun r = run_cli(args);
      if (r.code != cli::kExitOk) {
        failure = args[0] + " exited " + std::to_string(r.code) + ": " + r.err;
        break;
      }
    }
    for (const auto& name : reports) bytes[name] = slurp(dir / name);
    fs::remove_all(dir);
    return bytes;
  };

  std::string failure;
  const auto first = run("1", failure);
  const auto second = failure.empty() ? run(std::to_string(std::max(2u, worker_count(o))), failure) : first;
  if (!failure.empty()) return {"", "", false, failure, 0};
  std::size_t total = 0;
  std::vector<std::string> differing;
  for (const auto& name : reports) {
    total += first.at(name).size();
    if (first.at(name) != second.at(name) || first.at(name).empty()) differing.push_back(name);
  }
  std::string detail = std::to_string(reports.size()) + " reports, " + std::to_string(total) +
                       " bytes per run, eval with 1 vs " + std::to_string(std::max(2u, worker_count(o))) +
                       " workers";
  for (const auto& name : differing) detail += "; differs: " + name;
  return {"", "", differing.empty(), detail, 0};
}

CriterionResult oracle_agreement(const VerifyOptions& o) {
  std::vector<std::pair<std::string, Population>> cases{{"P_A", fixtures::population_a()},
                                                        {"P_B", fixtures::population_b()}};
  std::mt19937_64 rng(stream_seed(o, 11));
  RandomPopulationParams params;
  params.max_rollouts = 3;
  params.max_height = 3;
  params.max_classes = 2;
  for (int attempts = 0; cases.size() < 6 && attempts < 1000; ++attempts) {
    const Population p = fixtures::random_population(rng, params);
    if (generator_index(p).size() < 3) continue;
    try {
      full_orbit(p, 1000);
    } catch (const OrbitCapExceeded&) {
      continue;
    }
    cases.push_back({"random " + describe(p), p});
  }

  Tally tally;
  double worst = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const Population& p = cases[k].second;
    const std::vector<Schema> schemata = schemata_up_to(p, 2, false);
    const OrbitSet orbit = enumerate_orbit(p);
    const ChainTrace trace = run_chain(p, 1'000'000, TransformDistribution(p), schemata, stream_seed(o, 110 + k));
    for (std::size_t i = 0; i < schemata.size(); ++i) {
      const double diff = std::abs(to_double(trace.phi(i)) - to_double(orbit_frequency(orbit, schemata[i])));
      worst = std::max(worst, diff);
      tally.check(diff <= 0.01, [&] { return cases[k].first + " " + format_schema(schemata[i]) + ": " + fmt(diff); });
    }
  }
  return {"", "", tally.failures == 0,
          std::to_string(cases.size()) + " populations, T = 10^6, max |Phi - orbit mean| " + fmt(worst) + "; " +
              tally.summary("schemata"),
          0};
}

CriterionResult estimator_consistency(const VerifyOptions& o) {
  std::vector<EvalCase> cases{
      {"P_B", fixtures::population_b(), payoffs({{"f1", 1}, {"f2", 0}}), {}},
      {"P_A", fixtures::population_a(), payoffs({{"f1", 1}, {"f2", 0}, {"f3", 2}}), {}},
      {"P_B'", fixtures::population_b(), payoffs({{"f1", -3}, {"f2", 5}}), {}},
  };
  for (std::uint64_t k = 0; k < 4; ++k) {
    SimConfig cfg;
    cfg.seed = stream_seed(o, 120 + k);
    cfg.rollouts = 12;
    const EnvModel env = make_random_pomdp(cfg);
    const GeneratedPopulation gen =
        generate_population(env, default_action_sequence(env, cfg.rollouts), stream_seed(o, 130 + k));
    cases.push_back({"env#" + std::to_string(k), gen.population, gen.payoffs, {}});
  }
  Tally tally;
  std::string detail;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    evaluate_against_oracle(cases[k], 20'000, stream_seed(o, 140 + k), worker_count(o), tally);
  }
  return {"", "", tally.failures == 0,
          std::to_string(cases.size()) + " populations, N = 20000, " + tally.summary("action checks"), 0};
}

CriterionResult inflation_scaling(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 13));
  Tally tally;
  for (int n = 0; n < 100; ++n) {
    const Population p = fixtures::random_population(rng, mixed_params());
    const auto schemata = schemata_up_to(p, 2, false);
    for (std::uint32_t m = 1; m <= 3; ++m) {
      const Population q = inflate(p, m);
      tally.check(std::holds_alternative<Population>(validate_population(q.rollouts())) && (m != 1 || q == p),
                  [&] { return "inflate(" + describe(p) + "," + std::to_string(m) + ") invalid"; });
      const DownReport dp = down_report(p);
      const DownReport dq = down_report(q);
      for (const auto& h : schemata) {
        tally.check(schema_count(h, q) == m * schema_count(h, p) &&
                        limiting_frequency(dq, h) == limiting_frequency(dp, h),
                    [&] { return format_schema(h) + " on inflate(" + describe(p) + "," + std::to_string(m) + ")"; });
      }
    }
  }
  return {"", "", tally.failures == 0, tally.summary("checks"), 0};
}

CriterionResult digraph_agreement(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 14));
  Tally tally;
  for (int n = 0; n < 500; ++n) {
    const Population p = fixtures::random_population(rng, mixed_params());
    const WeightedDigraph g = build_digraph(p);
    const DownReport d = down_report(p);
    bool ok = true;
    for (const auto& [key, count] : d.action_order) ok = ok && g.weight(Node{key.first}, Node{key.second}) == count;
    for (const auto& [key, count] : d.class_order) ok = ok && g.weight(Node{key.first}, Node{key.second}) == count;
    for (const auto& [i, occ] : d.occurrences) {
      std::uint64_t exits = 0;
      for (const auto& [to, w] : g.successors(Node{i})) exits += std::holds_alternative<TerminalLabel>(to) ? w : 0;
      ok = ok && exits == d.terminal_count(i) && g.out_weight(Node{i}) == occ;
    }
    std::vector<Rollout> shuffled = p.rollouts();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    WeightedDigraph h;
    for (const auto& r : shuffled) h = ingest_rollout(std::move(h), r);
    ok = ok && h == g;
    tally.check(ok, [&] { return describe(p); });
  }
  return {"", "", tally.failures == 0, tally.summary("populations"), 0};
}

CriterionResult envsim_validity(const VerifyOptions& o) {
  std::mt19937_64 rng(stream_seed(o, 15));
  auto pick = [&](std::uint32_t lo, std::uint32_t hi) { return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng); };
  Tally tally;
  for (int n = 0; n < 10'000; ++n) {
    SimConfig cfg;
    cfg.states = pick(1, 8);
    cfg.observations = pick(1, cfg.states);
    cfg.actions = pick(1, 4);
    cfg.max_branching = pick(1, 3);
    cfg.depth_cap = pick(1, 5);
    cfg.rollouts = pick(1, 10);
    cfg.seed = rng();
    const EnvModel env = make_random_pomdp(cfg);
    const GeneratedPopulation gen = generate_population(env, default_action_sequence(env, cfg.rollouts), rng());
    bool ok = std::holds_alternative<Population>(validate_population(gen.population.rollouts())) &&
              gen.population.size() == cfg.rollouts;
    for (std::size_t i = 0; i < gen.population.size() && ok; ++i) {
      const Rollout& r = gen.population[i];
      ok = r.states.size() <= cfg.depth_cap && gen.hidden[i].size() == r.states.size() &&
           gen.payoffs.find(r.terminal) != nullptr;
      for (std::size_t k = 0; k < r.states.size() && ok; ++k) ok = r.states[k].cls == env.observation[gen.hidden[i][k]];
    }
    // Equivalent hidden states expose identical action sets.
    for (std::uint32_t s = 1; s <= cfg.states && ok; ++s) {
      for (std::uint32_t t = s + 1; t <= cfg.states && ok; ++t) {
        if (env.observation[s] == env.observation[t]) ok = env.actions_at(s) == env.actions_at(t);
      }
    }
    tally.check(ok, [&] { return canonical_dump(to_json(cfg)); });
  }
  return {"", "", tally.failures == 0, tally.summary("configs"), 0};
}

}  // namespace

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks{
      {"1", "involution & conservation", true, involution},
      {"2", "stat invariance", true, stat_invariance},
      {"3", "homologous exactness", true, homologous_exactness},
      {"4", "chain convergence", true, chain_convergence},
      {"5", "uniform stationarity", true, uniform_stationarity},
      {"6", "inflation limit", true, inflation_limit},
      {"7", "evaluator vs oracle", true, evaluator_oracle},
      {"8", "flow conservation", true, flow_conservation},
      {"9", "terminal count identity", true, terminal_identity},
      {"10", "end-to-end determinism", true, pipeline_determinism},
      {"I1", "chain vs orbit oracle agreement", false, oracle_agreement},
      {"I2", "estimator consistency", false, estimator_consistency},
      {"I3", "inflation scaling", false, inflation_scaling},
      {"I4", "digraph vs statistics agreement", false, digraph_agreement},
      {"I5", "environment validity", false, envsim_validity},
  };
  return checks;
}

std::vector<CriterionResult> run_checks(const std::vector<std::string>& ids, const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& on_result) {
  for (const auto& id : ids) {
    const auto& checks = all_checks();
    if (std::none_of(checks.begin(), checks.end(), [&](const Check& c) { return c.id == id; })) {
      throw std::invalid_argument("unknown check id '" + id + "'");
    }
  }
  std::vector<CriterionResult> results;
  for (const auto& check : all_checks()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), check.id) == ids.end()) continue;
    const auto started = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = check.run(options);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.id = check.id;
    r.name = check.name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << " " << r.id << " " << r.name << " (" << std::fixed << std::setprecision(2)
    << r.seconds << " s): " << r.detail;
  return s.str();
}

}  // namespace geiringer
