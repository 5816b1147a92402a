#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ocdmd::cli {

// Parses args (args[0] is the program name), runs the subcommand and maps
// failures to exit codes: 0 ok, 2 usage, 3 data error, 4 numeric error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ocdmd::cli
