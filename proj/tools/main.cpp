#include <iostream>
#include <string>
#include <vector>

#include "cli/app.hpp"

int main(int argc, char** argv) {
  return ocdmd::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
