#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ineq {

// Parses args (program name excluded) and runs the requested subcommand.
// Returns the process exit status: 0 success, 2 usage error, 1 data or
// numeric error (diagnostic names the failing stage).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ineq
