#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gatecheck::cli {

/// Runs one CLI invocation. `args` excludes the program name. Exit codes:
/// 0 success, 1 usage or validation error, 2 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gatecheck::cli
