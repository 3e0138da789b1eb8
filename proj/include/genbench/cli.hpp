#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace genbench {

/// Entry point of the `genbench` tool. `args` excludes the program name.
/// Returns 0 on success, 1 for validation errors and usage errors, 2 for
/// runtime failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genbench
