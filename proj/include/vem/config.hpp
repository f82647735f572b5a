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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vem/integrator.hpp"
#include "vem/multipliers.hpp"
#include "vem/problem.hpp"
#include "vem/state.hpp"

namespace vem
{

/// One value of a flat key/value config file.
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

/**
 * Parses a flat TOML-style document: `key = value` lines, optional
 * `[section]` headers, `#` comments. Values are numbers, booleans, quoted
 * strings or flat numeric arrays. Keys come back as "section.key".
 */
std::map<std::string, ConfigValue> parseKeyValues(const std::string &text);

struct GuessSpec
{
  Eigen::VectorXd x;       // empty: use x0
  Eigen::VectorXd u;       // empty: zeros
  Eigen::VectorXd u_slope; // empty: zeros
  double tf = 0.0;         // <= 0: problem nominal value
  std::string file;        // trajectory CSV (t, x..., u...), overrides x/u
};

struct RunSpec
{
  std::string problem_name;
  double y_bound = -2.0;
  ProblemDef problem;
  int nodes = 41;
  GainSet gains;
  GuessSpec guess;
  IntegratorConfig integrator;
  bool mesh_convection = true;
  std::string output_dir = ".";
  std::vector<double> snapshot_taus{0.0, 3.0, 10.0, 30.0, 100.0, 300.0};
};

/// Command line and environment overrides; unset fields leave the spec alone.
struct RunOverrides
{
  std::optional<double> tau_max;
  std::optional<int> nodes;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<bool> mesh_convection;
  std::optional<std::string> output_dir;
};

/// Environment variable that overrides the output directory.
inline constexpr const char *kOutputDirEnv = "VEM_OUTPUT_DIR";

/// Builds and validates a RunSpec. Relative file paths resolve against base_dir.
RunSpec parseConfigText(const std::string &text, const std::string &base_dir = ".");

/// Reads the file and calls parseConfigText. Missing files raise ConfigurationError.
RunSpec parseConfig(const std::string &path);

/// Applies overrides and re-validates.
void applyOverrides(RunSpec &spec, const RunOverrides &overrides);

/// Throws ConfigurationError on an inconsistent spec.
void validateRunSpec(const RunSpec &spec);

/// The initial candidate solution described by spec.guess.
SolutionState initialGuess(const RunSpec &spec);

} // namespace vem
