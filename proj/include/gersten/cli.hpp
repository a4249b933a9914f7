#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gersten::cli {

// exit code 0: success; 1: a mathematical check failed (with witnesses on
// the output stream); 2: usage or input errors
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gersten::cli
