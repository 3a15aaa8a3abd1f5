#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace geiringer {

struct CriterionResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  /// Walk evaluation threads; 0 picks the hardware concurrency.
  unsigned workers = 0;
};

struct Check {
  std::string id;
  std::string name;
  /// Acceptance criteria are "1".."10"; the remaining checks cover further invariants.
  bool acceptance = false;
  std::function<CriterionResult(const VerifyOptions&)> run;
};

const std::vector<Check>& all_checks();

/// Runs the checks with the given ids (all when empty) in listed order.
/// Exceptions inside a check count as failures. `on_result` sees each result
/// as soon as it is available.
std::vector<CriterionResult> run_checks(const std::vector<std::string>& ids, const VerifyOptions& options,
                                        const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS 3 homologous exactness (1.20 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace geiringer
