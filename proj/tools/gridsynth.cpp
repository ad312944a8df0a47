#include <iostream>
#include <string>
#include <vector>

#include "gridsynth/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return gridsynth::cli::run(args, std::cout, std::cerr);
}
