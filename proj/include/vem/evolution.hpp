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

#include <Eigen/Dense>

#include "vem/mesh.hpp"
#include "vem/multipliers.hpp"
#include "vem/problem.hpp"
#include "vem/sensitivity.hpp"
#include "vem/state.hpp"
#include "vem/transition.hpp"

namespace vem
{

struct EvolutionOptions
{
  /// Hold node values at fixed normalized coordinate s while t_f moves. Adds
  /// s_i * dt_f/dtau * d/dt to every node rate.
  bool mesh_convection = true;
};

/// Multipliers solved first, then the bundle's "_tc" terms filled in.
SensitivityBundle computeSensitivities(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                                       const TransitionSet &ts, const MultiplierResult &multipliers);

/// du/dtau = -K p_u_bar_tc at every node.
Eigen::MatrixXd controlRate(const SensitivityBundle &bundle, const GainSet &gains);

/// dt_f/dtau = -k_tf p_tf_tc; exactly zero for fixed terminal time.
double terminalTimeRate(const ProblemDef &problem, const SensitivityBundle &bundle, const GainSet &gains);

/**
 * dx/dtau(t_i) = -Phi(t_i, t0) K_x0 e_x0
 *               + int_{t0}^{t_i} Phi(t_i, s) (f_u du/dtau - K_f e_f)(s) ds
 */
Eigen::MatrixXd stateRate(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                          const GainSet &gains, const SensitivityBundle &bundle, const Eigen::MatrixXd &u_rates);

/// All intermediate products of one right-hand-side evaluation.
struct EvolutionEval
{
  Grid grid;
  TransitionSet transitions;
  SensitivityBundle bundle;
  MultiplierResult multipliers;
  StateDerivative rate;
};

/// Full pipeline for one state: grid, transitions, sensitivities, active-set
/// multipliers, control/terminal-time/state rates, moving-grid correction.
EvolutionEval evaluateEvolution(const ProblemDef &problem, const SolutionState &state, const GainSet &gains,
                                const EvolutionOptions &options = {});

StateDerivative evolutionRhs(const ProblemDef &problem, const SolutionState &state, const GainSet &gains,
                             const EvolutionOptions &options = {});

} // namespace vem
