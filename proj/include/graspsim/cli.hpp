#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace graspsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "N" is the first N seeds (1..N), "a-b" an inclusive range and "a,b,c" an
/// explicit list. Throws ConfigError on anything else.
std::vector<std::uint64_t> parse_seeds(std::string_view text);

}  // namespace graspsim::cli
