#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdmarket::cli {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit status: 0 on success, 2 for parse errors, 3 for invariant
/// violations, 4 for solver failures, 1 for anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowdmarket::cli
