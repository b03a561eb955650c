#include <cstdlib>
#include <iostream>

#include <pendnf/cli.hpp>

int main(int argc, char **argv)
{
    return pendnf::cli::run(argc, argv, std::cout, std::cerr, std::getenv("PEND_NF_MAX_ORDER"));
}
