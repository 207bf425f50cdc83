#include <iostream>

#include "cpflow/cli.hpp"

int main(int argc, char** argv)
{
    return cpflow::run_cli(argc, argv, std::cout, std::cerr);
}
