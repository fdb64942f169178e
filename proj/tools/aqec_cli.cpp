#include <iostream>
#include <string>
#include <vector>

#include "aqec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return aqec::cli_main(std::move(args), std::cout, std::cerr);
}
