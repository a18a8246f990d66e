#include <iostream>

#include "powerprov/cli.hpp"

int main(int argc, char** argv)
{
    return powerprov::cli::main(argc, argv, std::cout, std::cerr);
}
