#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpsa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitAudit = 4;

/// Runs one subcommand; args excludes the program name. Diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace mpsa::cli
