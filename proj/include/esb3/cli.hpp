#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace esb3::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kInputError = 2,
    kNonConvergence = 3,
    kDegenerateData = 4,
};

/// Runs the tool. `args` excludes the program name. Documents go to --out
/// when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace esb3::cli
