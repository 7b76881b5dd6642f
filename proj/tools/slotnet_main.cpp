#include <iostream>

#include "slotnet/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return slotnet::cli::run(args, std::cout, std::cerr);
}
