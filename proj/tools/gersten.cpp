#include <iostream>
#include <vector>

#include "gersten/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gersten::cli::run(args, std::cout, std::cerr);
}
