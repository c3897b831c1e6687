#ifndef POQG_CLI_HPP
#define POQG_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace poqg {

// Full command-line entry point, callable in-process. `args` excludes the
// program name. Returns the process exit code: 0 success, 2 configuration or
// usage error, 3 data or input-file error, 4 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace poqg

#endif
