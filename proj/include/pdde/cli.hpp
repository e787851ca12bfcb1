#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace pdde {

/// Command-line entry point shared by the binary and the tests. args holds
/// everything after the program name. Returns the process exit code:
/// 0 success, 2 invalid input, 3 numerical failure.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace pdde
