#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmb::cli {

// Exit codes: 0 every verdict passed, 1 some verdict failed or a run failed, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmb::cli
