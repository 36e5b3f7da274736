#include <iostream>
#include <string>
#include <vector>

#include "beliefplan/harness.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return beliefplan::cli_main(args, std::cout, std::cerr);
}
