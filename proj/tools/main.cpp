#include <iostream>
#include <string>
#include <vector>

#include "tsm/cli.hpp"

int main(int argc, char** argv)
{
    return tsm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
