#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace newsflow::cli {

// Runs one CLI invocation. args[0] is the program name.
// Returns 0 on success, 1 on a processing error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newsflow::cli
