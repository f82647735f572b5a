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

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vem/evolution.hpp"
#include "vem/mesh.hpp"
#include "vem/multipliers.hpp"
#include "vem/problem.hpp"
#include "vem/state.hpp"

namespace vem
{

/// phi(x(t_f), t_f) + trapezoid of L over the grid.
double performanceIndex(const ProblemDef &problem, const SolutionState &state, const Grid &grid);

/// Weights of the Lyapunov functional and the bound estimates they were
/// derived from (||p_f||, ||p_x0||, ||pi_E||, ||pi_I||).
struct LyapunovConfig
{
  double c1 = 0.0;
  double c2 = 0.0;
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double d4 = 1.0;
};

/// The ratios whose minimum bounds c1 from above. Constraint terms that do
/// not exist (q_E = 0 or q_I = 0) are omitted.
std::vector<double> lyapunovRatios(const ProblemDef &problem, const GainSet &gains, double horizon, double d1,
                                   double d2, double d3, double d4);

/// c1 = 0.5 * min(ratios), c2 = 2 * k_tf / (2 c1 min eig(K_f)), or 1 when k_tf = 0.
LyapunovConfig lyapunovConstants(const ProblemDef &problem, const GainSet &gains, double horizon, double d1,
                                 double d2, double d3, double d4);

/// Bound estimates are 10x the values found at the given state, floored at 1.
LyapunovConfig calibrateLyapunov(const ProblemDef &problem, const SolutionState &state, const GainSet &gains,
                                 const EvolutionOptions &options = {});

/**
 * V = ||e_x0|| + int ||e_f|| dt + ||g_E|| + ||g_I(I)|| + c1 J + (c2 / 2) ||e_f(t_f)||^2
 * with I = {i : g_I[i] >= 0}.
 */
double lyapunovValue(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                     const LyapunovConfig &cfg);

/// (int ||p_u_bar_tc|| dt, |p_tf_tc|); the second entry is 0 for fixed t_f.
std::pair<double, double> optimalityResiduals(const ProblemDef &problem, const SensitivityBundle &bundle,
                                              const Grid &grid);

/**
 * lambda(t) = phi_x(t) + Phi^T(t_f, t) (g_E_x^T pi_E + g_I_x^T pi_I)
 *           + int_t^{t_f} Phi^T(sigma, t) q(sigma) dsigma
 * so that L_u + f_u^T lambda equals p_u_bar_tc.
 */
Eigen::MatrixXd reconstructCostates(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                                    const TransitionSet &ts, const Eigen::VectorXd &pi_E,
                                    const Eigen::VectorXd &pi_I);

struct DiagnosticsRecord
{
  double tau = 0.0;
  double J = 0.0;
  double V = 0.0;
  double tf = 0.0;
  double norm_e_x0 = 0.0;
  double norm_e_f_int = 0.0;
  double norm_g_E = 0.0;
  double norm_g_I_violated = 0.0;
  double norm_pu_tc = 0.0;
  double abs_ptf_tc = 0.0;
  double rhs_norm = 0.0;
  Eigen::VectorXd g_E;
  Eigen::VectorXd g_I;
  Eigen::VectorXd pi_E;
  Eigen::VectorXd pi_I;
  std::vector<int> active_set;

  /// Bit i set when inequality i is in the active set.
  unsigned long activeMask() const;
};

/// Builds a record from one full right-hand-side evaluation.
DiagnosticsRecord makeRecord(const ProblemDef &problem, const SolutionState &state, const EvolutionEval &eval,
                             const LyapunovConfig &lyap, double tau);

} // namespace vem
