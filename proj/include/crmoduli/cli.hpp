#pragma once

// Command-line front end: parses exact rational model coefficients, runs the
// requested pipeline, and emits text, JSON, or LaTeX reports.

#include <iosfwd>
#include <string>
#include <vector>

namespace crmoduli {

// One invocation against explicit streams. args holds the arguments after
// the program name. Returns the process exit status: 0 success, 1 usage
// error, 2 mathematical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace crmoduli
