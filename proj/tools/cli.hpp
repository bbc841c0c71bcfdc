#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ek::cli {

// Runs one CLI invocation. Returns the process exit code:
//   0 success, 1 domain error (JSON error object on `err`), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ek::cli
