#include <iostream>
#include <string>
#include <vector>

#include "fusedlasso_cli/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fusedlasso::cli::run(args, std::cout, std::cerr);
}
