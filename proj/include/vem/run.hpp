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

#include <exception>
#include <string>
#include <vector>

#include "vem/config.hpp"
#include "vem/diagnostics.hpp"
#include "vem/integrator.hpp"
#include "vem/state.hpp"

namespace vem
{

/// tau, J, V, t_f, feasibility and residual norms, rhs_norm, g_E_*, g_I_*,
/// pi_E_*, pi_I_*, active_set (bitmask over inequality indices).
std::vector<std::string> historyHeader(int q_E, int q_I);
std::vector<double> historyRow(const DiagnosticsRecord &record);

/// Header-only output for an empty record list.
void emitCsv(const std::vector<DiagnosticsRecord> &records, int q_E, int q_I, const std::string &path);

/// Columns t, x_*, u_*, xdot_*, e_f_norm, one row per node.
void emitSnapshot(const ProblemDef &problem, const SolutionState &state, const std::string &path);

/// "snapshot_<tau>.csv" with tau in shortest "%g" form.
std::string snapshotFileName(double tau);

/// Exit status for an error: 2 configuration, 3 numerical, 4 I/O.
int exitCodeFor(const std::exception_ptr &error);

struct RunResult
{
  int exit_code = 0;
  std::string message;
  IntegrationResult integration;
  std::vector<DiagnosticsRecord> history;
  SolutionState final_state;
  LyapunovConfig lyapunov;
};

/**
 * Integrates the spec and writes history.csv, the snapshots and
 * final_summary.csv into spec.output_dir. On an aborted integration the
 * partial history is still written and final_summary.csv is not.
 */
RunResult run(const RunSpec &spec);

/// Same as run() without touching the filesystem.
RunResult solve(const RunSpec &spec);

} // namespace vem
