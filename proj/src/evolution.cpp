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

#include "vem/evolution.hpp"

#include <string>

#include "vem/error.hpp"

namespace vem
{

SensitivityBundle computeSensitivities(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                                       const TransitionSet &ts, const MultiplierResult &multipliers)
{
  SensitivityBundle b = computeBaseSensitivities(problem, state, grid, ts);
  applyMultipliers(b, ts, multipliers.pi_E, multipliers.pi_I);
  return b;
}

Eigen::MatrixXd controlRate(const SensitivityBundle &bundle, const GainSet &gains)
{
  return -bundle.p_u_bar_tc * gains.K.transpose();
}

double terminalTimeRate(const ProblemDef &problem, const SensitivityBundle &bundle, const GainSet &gains)
{
  if (!problem.tf_free)
    return 0.0;
  return -gains.k_tf * bundle.p_tf_tc;
}

Eigen::MatrixXd stateRate(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                          const GainSet &gains, const SensitivityBundle &bundle, const Eigen::MatrixXd &u_rates)
{
  const int N = grid.N;
  if (u_rates.rows() != N || u_rates.cols() != problem.m)
    throw ShapeError("control rates do not match grid");

  // Phi(t_i, s) = Phi(t_i, t0) Phi(t0, s): integrate in the t0 frame, then map.
  Eigen::MatrixXd integrand(N, problem.n);
  for (int j = 0; j < N; ++j)
  {
    const Eigen::VectorXd v = bundle.f_u[j] * u_rates.row(j).transpose() - gains.K_f * bundle.e_f.row(j).transpose();
    integrand.row(j) = (ts.toStart(j) * v).transpose();
  }
  const Eigen::MatrixXd cumulative = runningTrapezoid(integrand, grid);
  const Eigen::VectorXd start = -gains.K_x0 * bundle.e_x0;

  Eigen::MatrixXd dX(N, problem.n);
  for (int i = 0; i < N; ++i)
    dX.row(i) = (ts.fromStart(i) * (start + cumulative.row(i).transpose())).transpose();
  return dX;
}

EvolutionEval evaluateEvolution(const ProblemDef &problem, const SolutionState &state, const GainSet &gains,
                                const EvolutionOptions &options)
{
  const int N = state.nodes();
  const double tf = problem.tf_free ? state.tf : problem.tf;

  EvolutionEval ev;
  auto stage = [](const char *label, auto &&fn) {
    try
    {
      return fn();
    }
    catch (const Error &e)
    {
      // Keep the category so the exit code survives the relabeling.
      if (e.category() == Error::Category::Configuration)
        throw ConfigurationError(std::string(label) + ": " + e.what());
      if (dynamic_cast<const ControllabilityError *>(&e))
        throw ControllabilityError(std::string(label) + ": " + e.what());
      if (dynamic_cast<const DegenerateActiveSetError *>(&e))
        throw DegenerateActiveSetError(std::string(label) + ": " + e.what());
      if (dynamic_cast<const IllConditionedTransitionError *>(&e))
        throw IllConditionedTransitionError(std::string(label) + ": " + e.what());
      throw EvaluationError(std::string(label) + ": " + e.what());
    }
    catch (const std::exception &e)
    {
      throw EvaluationError(std::string(label) + ": " + e.what());
    }
  };

  ev.grid = stage("grid", [&] { return makeGrid(N, problem.t0, tf); });
  ev.transitions = stage("transitions", [&] { return propagateTransitions(problem, state, ev.grid); });
  ev.bundle = stage("sensitivities", [&] { return computeBaseSensitivities(problem, state, ev.grid, ev.transitions); });
  ev.multipliers = stage("multipliers", [&] {
    return solveActiveSet(problem, ev.grid, ev.transitions, gains, ev.bundle);
  });
  applyMultipliers(ev.bundle, ev.transitions, ev.multipliers.pi_E, ev.multipliers.pi_I);

  StateDerivative &rate = ev.rate;
  rate.dU = controlRate(ev.bundle, gains);
  rate.dtf = terminalTimeRate(problem, ev.bundle, gains);
  rate.dX = stage("state rate", [&] {
    return stateRate(problem, ev.grid, ev.transitions, gains, ev.bundle, rate.dU);
  });

  if (problem.tf_free && options.mesh_convection && rate.dtf != 0.0)
  {
    for (int i = 0; i < N; ++i)
    {
      const double w = ev.grid.s(i) * rate.dtf;
      rate.dX.row(i) += w * ev.bundle.xdot.row(i);
      rate.dU.row(i) += w * ev.bundle.udot.row(i);
    }
  }
  return ev;
}

StateDerivative evolutionRhs(const ProblemDef &problem, const SolutionState &state, const GainSet &gains,
                             const EvolutionOptions &options)
{
  return evaluateEvolution(problem, state, gains, options).rate;
}

} // namespace vem
