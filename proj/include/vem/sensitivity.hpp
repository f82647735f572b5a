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

#include <vector>

#include <Eigen/Dense>

#include "vem/mesh.hpp"
#include "vem/problem.hpp"
#include "vem/state.hpp"
#include "vem/transition.hpp"

namespace vem
{

/**
 * Everything the multiplier solve and the evolution rates need about the
 * current trajectory. Series are N rows, one per node.
 *
 * The backward kernel is
 *
 *   w(t) = int_t^{t_f} Phi^T(sigma, t) q(sigma) dsigma,
 *   q    = L_x + phi_tx + phi_xx^T xdot + f_x^T phi_x,
 *
 * and the control sensitivity p_u_bar = L_u + f_u^T (phi_x + w). The "_tc"
 * fields add the terminal-constraint terms and are only valid after
 * applyMultipliers().
 */
struct SensitivityBundle
{
  Eigen::MatrixXd xdot; // finite-difference dx/dt
  Eigen::MatrixXd udot; // finite-difference du/dt
  Eigen::MatrixXd f;
  Eigen::MatrixXd e_f;  // xdot - f
  Eigen::VectorXd e_x0; // x(t0) - x0

  std::vector<Eigen::MatrixXd> f_x;
  std::vector<Eigen::MatrixXd> f_u;
  Eigen::VectorXd L;
  Eigen::MatrixXd phi_x; // Mayer gradient along the trajectory

  Eigen::MatrixXd q;
  Eigen::MatrixXd w;
  Eigen::MatrixXd p_u_bar;
  Eigen::MatrixXd p_f;
  Eigen::MatrixXd p_x0;

  /// L + phi_t + phi_x^T xdot at t_f.
  double p_tf = 0.0;

  TerminalConstraint g_E;
  TerminalConstraint g_I;

  Eigen::MatrixXd p_u_bar_tc;
  double p_tf_tc = 0.0;
};

/// Builds the multiplier-independent part of the bundle.
SensitivityBundle computeBaseSensitivities(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                                           const TransitionSet &ts);

/// Fills p_u_bar_tc and p_tf_tc for the given multipliers.
void applyMultipliers(SensitivityBundle &bundle, const TransitionSet &ts, const Eigen::VectorXd &pi_E,
                      const Eigen::VectorXd &pi_I);

/// n-vector g_E_x^T pi_E + g_I_x^T pi_I.
Eigen::VectorXd terminalAdjoint(const SensitivityBundle &bundle, const Eigen::VectorXd &pi_E,
                                const Eigen::VectorXd &pi_I);

} // namespace vem
