#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chronoscope {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `chronoscope` command line. `args[0]` is the program name.
/// Data errors print one line "chronoscope: error code=<Code> message=<text>"
/// to `err` and return kExitDataError.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chronoscope
