#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geiringer::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitVerification = 4;

inline constexpr const char* kToolVersion = "geiringer 0.1.0";

/// Runs one subcommand (gen, mix, limit, orbit, eval, verify). `args`
/// excludes the program name. Reports go to --out when given, else to `out`;
/// diagnostics and wall-clock timings go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace geiringer::cli
