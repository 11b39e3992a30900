#include "polyvol/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return polyvol::cli_main(argc, argv, std::cout, std::cerr);
}
