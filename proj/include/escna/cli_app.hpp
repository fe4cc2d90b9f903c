#pragma once

#include <string>
#include <vector>

namespace escna::cli {

// Parses and runs one command line; `args` excludes the program name.
// Returns 0 on success, 2 on usage or configuration errors, 1 on runtime
// errors. A run manifest is written in every case except --help.
int run_cli(std::vector<std::string> args);

} // namespace escna::cli
