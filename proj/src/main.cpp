#include <string>
#include <vector>

#include "nlod/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return nlod::cli_run(args);
}
