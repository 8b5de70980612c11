#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ellab::cli {

/// Exit codes: 0 every verdict passes, 1 some verdict fails, 2 usage,
/// configuration or output error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

const std::vector<std::string>& command_names();

}  // namespace ellab::cli
