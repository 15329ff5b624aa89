#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace approxmul::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kConsistency = 3 };

/// Runs the tool with `args` (argv without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace approxmul::cli
