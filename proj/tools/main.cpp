#include <vector>

#include "relaxlearn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relaxlearn::cli::run(args);
}
