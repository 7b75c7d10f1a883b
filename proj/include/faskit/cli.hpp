#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace faskit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // data, model or numerical error
inline constexpr int kExitUsage = 2;    // bad command line

// Entry point of the faskit command. `args` excludes the program name.
// Reports go to `out`; diagnostics are a single line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace faskit
