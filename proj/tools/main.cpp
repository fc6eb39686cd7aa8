#include "cli_app.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    return steerscan::cli::run(argc, argv, std::cout, std::cerr, std::getenv("STEERSCAN_THREADS"));
}
