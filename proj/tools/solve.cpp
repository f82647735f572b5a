/*
 Copyright 2026 The vemsolve Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "vem/config.hpp"
#include "vem/error.hpp"
#include "vem/run.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"Evolve an initial guess toward the optimum of a terminal-constrained optimal control problem"};

  std::string config_path;
  vem::RunOverrides overrides;
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--tau-max", overrides.tau_max, "Final variation time");
  app.add_option("--nodes", overrides.nodes, "Number of time nodes");
  app.add_option("--rtol", overrides.rtol, "Relative integration tolerance");
  app.add_option("--atol", overrides.atol, "Absolute integration tolerance");
  std::string convection;
  app.add_option("--mesh-convection", convection, "Mesh convection term for free t_f")
      ->check(CLI::IsMember({"on", "off"}));
  std::string output_dir;
  app.add_option("--output-dir", output_dir, "Directory for CSV output");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!convection.empty())
    overrides.mesh_convection = convection == "on";

  vem::RunSpec spec;
  try
  {
    spec = vem::parseConfig(config_path);
    if (const char *env = std::getenv(vem::kOutputDirEnv); env && *env)
      spec.output_dir = env;
    if (!output_dir.empty())
      overrides.output_dir = output_dir;
    vem::applyOverrides(spec, overrides);
  }
  catch (const vem::Error &e)
  {
    std::cerr << "solve: " << e.what() << "\n";
    return vem::exitCodeFor(std::current_exception());
  }

  const vem::RunResult res = vem::run(spec);
  if (res.exit_code != 0)
  {
    std::cerr << "solve: " << res.message << "\n";
    return res.exit_code;
  }

  const vem::DiagnosticsRecord &last = res.history.back();
  std::cout << "tau = " << last.tau << "  J = " << last.J << "  t_f = " << last.tf
            << "  rhs_norm = " << last.rhs_norm << "\n";
  std::cout << "steps accepted " << res.integration.accepted_steps << ", rejected "
            << res.integration.rejected_steps << "\n";
  std::cout << "output written to " << spec.output_dir << "\n";
  return 0;
}
