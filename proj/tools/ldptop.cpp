#include <iostream>

#include "ldptop/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ldptop::run_cli(args, std::cout, std::cerr);
}
