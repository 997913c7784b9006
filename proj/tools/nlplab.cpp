#include <string>

#include "CLI11.hpp"
#include "nlplap/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlplab: nonlocal p-Laplacian laboratory"};
  app.require_subcommand(1);

  nlplap::CommandOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--out", opts.out_dir, "output directory (default: out)");
    sub->add_option("--threads", opts.threads, "assembly threads (default: 1)");
    sub->add_option("--seed", opts.seed, "seed recorded in the outputs");
  };

  CLI::App* validate =
      app.add_subcommand("validate-kernel", "check the kernel hypotheses numerically");
  CLI::App* solve = app.add_subcommand("solve", "solve one Dirichlet problem");
  CLI::App* poincare =
      app.add_subcommand("poincare", "estimate the nonlocal Poincare constant");
  CLI::App* experiment =
      app.add_subcommand("experiment", "run a coefficient-sequence convergence study");
  for (CLI::App* sub : {validate, solve, poincare, experiment}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return nlplap::cmd_validate_kernel(opts);
  if (solve->parsed()) return nlplap::cmd_solve(opts);
  if (poincare->parsed()) return nlplap::cmd_poincare(opts);
  return nlplap::cmd_experiment(opts);
}
