#pragma once

#include "geiringer/core_model.hpp"
#include "geiringer/digraph.hpp"
#include "geiringer/envsim.hpp"
#include "geiringer/statistics.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geiringer {

using Json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public std::invalid_argument {
 public:
  SyntaxError(const std::string& message, std::size_t token) : std::invalid_argument(message), token_(token) {}
  /// Zero-based index of the offending comma-separated token.
  std::size_t token() const { return token_; }

 private:
  std::size_t token_;
};

/// Schema text: "#" for ROOT, otherwise "action,c1,...,ck,tail" where tail
/// is "#" or a terminal name. Terminal names cannot be all digits.
Schema parse_schema(std::string_view text);
std::string format_schema(const Schema& h);

struct PopulationFile {
  Population population;
  PayoffMap payoffs;
};

/// {"rollouts":[{"action":..,"states":[[cls,"tag",copy],..],"terminal":..},..],
///  "payoffs":{"f1":"3/2",..}}. Throws ParseError for malformed input and
/// ValidationError when a distinctness invariant fails.
PopulationFile population_from_json(const Json& j);
Json to_json(const PopulationFile& file);
Json to_json(const Population& p);

PopulationFile read_population_file(const std::filesystem::path& path);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);
Json read_json_file(const std::filesystem::path& path);

/// Re-reads and re-serializes a population file; returns the parsed population.
PopulationFile roundtrip_population(const std::filesystem::path& path);

/// {"nodes":{"actions":[..],"classes":[..],"terminals":[..]},"edges":[[from,to,w],..]}
/// with class nodes written "c<id>".
Json to_json(const WeightedDigraph& g);
WeightedDigraph digraph_from_json(const Json& j);

Json to_json(const DownReport& d);

Json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const Json& j);
Json to_json(const EnvModel& env);

}  // namespace geiringer
