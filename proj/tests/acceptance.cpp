#include "geiringer/verification.hpp"

#include <iostream>

int main() {
  std::vector<std::string> ids;
  for (const auto& check : geiringer::all_checks()) {
    if (check.acceptance) ids.push_back(check.id);
  }
  const auto results = geiringer::run_checks(ids, geiringer::VerifyOptions{},
                                             [](const auto& r) { std::cout << geiringer::format_result(r) << std::endl; });
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
