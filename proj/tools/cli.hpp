// The kkflows command line. Exit codes: 0 success, 1 numeric failure, 2 usage error.

#ifndef KKFLOWS_TOOLS_CLI_HPP
#define KKFLOWS_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace kkflows::cli {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kkflows::cli

#endif  // KKFLOWS_TOOLS_CLI_HPP
