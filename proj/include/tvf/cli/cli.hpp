#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tvf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRecordFailures = 1;  // also: evaluation aborted, backend failure
inline constexpr int kExitUsage = 2;           // usage, config and schema errors

/// args[0] is the program name.
[[nodiscard]] int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
[[nodiscard]] int run_cli(int argc, char** argv);

} // namespace tvf::cli
