#include <string>
#include <vector>

#include "coopfarm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto ctx = coopfarm::cli::process_context();
  return coopfarm::cli::run(args, ctx);
}
