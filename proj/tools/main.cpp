#include <iostream>
#include <string>
#include <vector>

#include "herdsim/cli.hpp"

int main(int argc, char** argv) {
    return herdsim::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
