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

#include "vem/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vem/csv.hpp"
#include "vem/error.hpp"
#include "vem/evolution.hpp"

namespace vem
{

std::vector<std::string> historyHeader(int q_E, int q_I)
{
  std::vector<std::string> h{"tau",        "J",          "V",           "t_f",
                             "norm_e_x0",  "norm_e_f_int", "norm_g_E",  "norm_g_I_violated",
                             "norm_pu_tc", "abs_ptf_tc", "rhs_norm"};
  for (int i = 1; i <= q_E; ++i)
    h.push_back("g_E_" + std::to_string(i));
  for (int i = 1; i <= q_I; ++i)
    h.push_back("g_I_" + std::to_string(i));
  for (int i = 1; i <= q_E; ++i)
    h.push_back("pi_E_" + std::to_string(i));
  for (int i = 1; i <= q_I; ++i)
    h.push_back("pi_I_" + std::to_string(i));
  h.push_back("active_set");
  return h;
}

std::vector<double> historyRow(const DiagnosticsRecord &r)
{
  std::vector<double> row{r.tau,        r.J,          r.V,        r.tf,
                          r.norm_e_x0,  r.norm_e_f_int, r.norm_g_E, r.norm_g_I_violated,
                          r.norm_pu_tc, r.abs_ptf_tc, r.rhs_norm};
  for (const Eigen::VectorXd *v : {&r.g_E, &r.g_I, &r.pi_E, &r.pi_I})
    row.insert(row.end(), v->data(), v->data() + v->size());
  row.push_back(static_cast<double>(r.activeMask()));
  return row;
}

void emitCsv(const std::vector<DiagnosticsRecord> &records, int q_E, int q_I, const std::string &path)
{
  const std::vector<std::string> header = historyHeader(q_E, q_I);
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const DiagnosticsRecord &r : records)
  {
    rows.push_back(historyRow(r));
    if (rows.back().size() != header.size())
      throw ShapeError("diagnostics record does not match the history layout");
  }
  writeCsv(path, header, rows);
}

void emitSnapshot(const ProblemDef &problem, const SolutionState &state, const std::string &path)
{
  const Grid grid = makeGrid(state.nodes(), problem.t0, state.tf);
  const Eigen::MatrixXd xdot = timeDerivative(state.X, grid);
  std::vector<std::string> header{"t"};
  for (int j = 1; j <= problem.n; ++j)
    header.push_back("x_" + std::to_string(j));
  for (int j = 1; j <= problem.m; ++j)
    header.push_back("u_" + std::to_string(j));
  for (int j = 1; j <= problem.n; ++j)
    header.push_back("xdot_" + std::to_string(j));
  header.push_back("e_f_norm");

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < grid.N; ++i)
  {
    const Eigen::VectorXd x = state.X.row(i).transpose();
    const Eigen::VectorXd u = state.U.row(i).transpose();
    const Eigen::VectorXd e = xdot.row(i).transpose() - evalDynamics(problem, x, u, grid.t(i));
    std::vector<double> row{grid.t(i)};
    row.insert(row.end(), x.data(), x.data() + x.size());
    row.insert(row.end(), u.data(), u.data() + u.size());
    for (int j = 0; j < problem.n; ++j)
      row.push_back(xdot(i, j));
    row.push_back(e.norm());
    rows.push_back(std::move(row));
  }
  writeCsv(path, header, rows);
}

std::string snapshotFileName(double tau)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "snapshot_%g.csv", tau);
  return buf;
}

int exitCodeFor(const std::exception_ptr &error)
{
  if (!error)
    return 0;
  try
  {
    std::rethrow_exception(error);
  }
  catch (const Error &e)
  {
    switch (e.category())
    {
    case Error::Category::Configuration:
      return 2;
    case Error::Category::Io:
      return 4;
    case Error::Category::Numerical:
      return 3;
    }
  }
  catch (...)
  {
  }
  return 3;
}

namespace
{

std::string messageOf(const std::exception_ptr &error)
{
  try
  {
    std::rethrow_exception(error);
  }
  catch (const std::exception &e)
  {
    return e.what();
  }
  catch (...)
  {
    return "unknown error";
  }
}

} // namespace

RunResult solve(const RunSpec &spec)
{
  RunResult res;
  const ProblemDef &p = spec.problem;
  const EvolutionOptions options{spec.mesh_convection};
  try
  {
    validateRunSpec(spec);
    const SolutionState guess = initialGuess(spec);
    res.lyapunov = calibrateLyapunov(p, guess, spec.gains, options);

    const int N = spec.nodes;
    const RhsFunction rhs = [&](double, const Eigen::VectorXd &y) {
      return pack(p, evolutionRhs(p, unpack(p, N, y), spec.gains, options));
    };
    const SampleCallback on_sample = [&](double tau, const Eigen::VectorXd &y) {
      const SolutionState s = unpack(p, N, y);
      res.history.push_back(makeRecord(p, s, evaluateEvolution(p, s, spec.gains, options), res.lyapunov, tau));
    };
    res.integration = integrate(rhs, pack(p, guess), spec.integrator, on_sample);
    res.final_state = unpack(p, N, res.integration.y_final);
    if (!res.integration.ok())
    {
      res.exit_code = exitCodeFor(res.integration.error);
      res.message = messageOf(res.integration.error);
    }
  }
  catch (...)
  {
    res.exit_code = exitCodeFor(std::current_exception());
    res.message = messageOf(std::current_exception());
  }
  return res;
}

RunResult run(const RunSpec &spec)
{
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec)
  {
    RunResult res;
    res.exit_code = 4;
    res.message = IoError("cannot create output directory " + spec.output_dir + ": " + ec.message()).what();
    return res;
  }

  RunResult res = solve(spec);
  const ProblemDef &p = spec.problem;
  const fs::path dir(spec.output_dir);
  try
  {
    emitCsv(res.history, p.q_E, p.q_I, (dir / "history.csv").string());
    if (res.exit_code != 0)
      return res;

    for (double want : spec.snapshot_taus)
    {
      if (want > spec.integrator.tau_max)
        continue;
      const Sample *best = nullptr;
      for (const Sample &s : res.integration.samples)
        if (!best || std::abs(s.tau - want) < std::abs(best->tau - want))
          best = &s;
      if (best)
        emitSnapshot(p, unpack(p, spec.nodes, best->y), (dir / snapshotFileName(want)).string());
    }

    std::vector<std::string> header = historyHeader(p.q_E, p.q_I);
    header.push_back("accepted_steps");
    header.push_back("rejected_steps");
    std::vector<double> row = historyRow(res.history.back());
    row.push_back(static_cast<double>(res.integration.accepted_steps));
    row.push_back(static_cast<double>(res.integration.rejected_steps));
    writeCsv((dir / "final_summary.csv").string(), header, {row});
  }
  catch (...)
  {
    res.exit_code = exitCodeFor(std::current_exception());
    res.message = messageOf(std::current_exception());
  }
  return res;
}

} // namespace vem
