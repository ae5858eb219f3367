#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coopfarm::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kIoError = 3,
  kGuardViolation = 4,
};

inline constexpr const char* kSeedEnvVar = "COOPFARM_SEED";

struct Context {
  std::ostream& out;
  std::ostream& err;
  // Value of COOPFARM_SEED, if set. Lower priority than --seed.
  std::optional<std::string> env_seed;
};

// Context bound to std::cout / std::cerr and the real environment.
Context process_context();

// args excludes the program name, e.g. {"fair", "--scenario", "s.json", "--out", "out"}.
int run(const std::vector<std::string>& args, Context& ctx);

}  // namespace coopfarm::cli
