#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ccmsel::cli {

/// Entry point shared by the executable and the tests. Returns the exit
/// status: 0 success, 1 domain/numeric/input error (error JSON on `err`),
/// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace ccmsel::cli
