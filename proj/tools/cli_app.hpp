#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hepkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). `interactive`
/// overrides the stdin terminal check that decides whether a missing
/// --seed is an error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err,
            std::optional<bool> interactive = std::nullopt);

}  // namespace hepkit::cli
