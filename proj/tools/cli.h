#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dvs::cli {

// Runs the dvs command line in-process. Returns the exit code: 0 success,
// 2 configuration error, 3 runtime or data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dvs::cli
