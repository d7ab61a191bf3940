#include <iostream>

#include "bdperiod/report.hpp"

int main(int argc, char** argv) {
  return bdperiod::run_cli(argc, argv, std::cout, std::cerr);
}
