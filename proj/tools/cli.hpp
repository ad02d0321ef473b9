#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hermsketch::cli {

// Runs one subcommand. Exit codes: 0 success, 2 usage error, 3 data error,
// 4 incompatible-sketch error. Errors go to err with a fixed prefix.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace hermsketch::cli
