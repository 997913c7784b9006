#pragma once

#include <cstdint>
#include <string>

namespace nlplap {

// Options common to every subcommand. The config file fully determines a
// run; out_dir receives the artifacts. The seed is recorded in the outputs
// (every computation here is deterministic, so it never changes a result).
struct CommandOptions {
  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  std::uint64_t seed = 0;
};

// Exit codes: 0 all checks passed / converged; 1 a check, solve, or trend
// failed (artifacts are still written); 2 malformed config (parse error,
// unknown key, or a parameter outside its admissible range).
int cmd_validate_kernel(const CommandOptions& opts);
int cmd_solve(const CommandOptions& opts);
int cmd_poincare(const CommandOptions& opts);
int cmd_experiment(const CommandOptions& opts);

}  // namespace nlplap
