#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sharpcontour {

/// Command-line entry point shared by the binary and the tests. `args`
/// excludes the program name. Exit codes: 0 ok, 2 parse error, 3 config
/// validation failure, 4 runtime error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sharpcontour
