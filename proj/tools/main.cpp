#include <string>
#include <vector>

#include "asgd/cli.hpp"

int main(int argc, char** argv) {
  return asgd::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
