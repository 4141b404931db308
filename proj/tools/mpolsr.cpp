#include "mpolsr/cli.hpp"

#include <iostream>

int
main(int argc, char** argv)
{
  return mpolsr::cli_main(argc, argv, std::cout, std::cerr);
}
