#pragma once

// Command-line front end: sweep, peak, shape-opt, validate, oracle.

#include <iosfwd>
#include <string>
#include <vector>

namespace photosplit::cli {

// Exit codes.
constexpr int kSuccess = 0;
constexpr int kFailure = 1;
constexpr int kUsageError = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace photosplit::cli
