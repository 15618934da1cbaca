// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "dynoffset/cli.hpp"

int main(int argc, char** argv)
{
    return dynoffset::run(argc, argv, std::cout, std::cerr);
}
