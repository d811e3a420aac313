#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roadnet::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInternalError = 2 };

/// Runs the command line `args` (args[0] is the program name). Diagnostics go
/// to `err`, short progress lines to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace roadnet::cli
