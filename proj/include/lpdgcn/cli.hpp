#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lpdgcn {

/// Command-line entry point. `args` excludes the program name. Returns 0 on
/// success, 2 for unusable flags or configuration (after printing usage) and
/// 1 when the command itself fails.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace lpdgcn
