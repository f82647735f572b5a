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
#include "vem/sensitivity.hpp"
#include "vem/state.hpp"
#include "vem/transition.hpp"

namespace vem
{

/// Evolution gains. Matrices must have a positive-definite symmetric part;
/// k_tf = 0 freezes the terminal time.
struct GainSet
{
  Eigen::MatrixXd K;    // m x m
  Eigen::MatrixXd K_x0; // n x n
  Eigen::MatrixXd K_f;  // n x n
  Eigen::MatrixXd K_gE; // q_E x q_E
  Eigen::VectorXd k_gI; // q_I
  double k_tf = 0.0;

  /// Every gain set to the given scalar (times the identity for matrices).
  static GainSet uniform(const ProblemDef &problem, double k, double k_tf);
};

/// Throws ConfigurationError naming the first gain that fails its check.
void checkGains(const ProblemDef &problem, const GainSet &gains);

/// Smallest and largest eigenvalue of the symmetric part of a.
std::pair<double, double> symmetricEigenRange(const Eigen::MatrixXd &a);

struct IndexSets
{
  std::vector<int> violated; // {i : g_I[i] >= 0}
  std::vector<int> active;   // subset of violated treated as equalities
};

IndexSets computeIndexSets(const Eigen::VectorXd &g_I);

struct LinearSystem
{
  Eigen::MatrixXd M;
  Eigen::VectorXd r;
};

/**
 * Constraint-independent reduction of the multiplier problem. With
 * Psi(t) = Phi(t_f, t) f_u(t) and all q_E + q_I terminal constraints stacked
 * (equalities first):
 *
 *   W  = int Psi K Psi^T dt
 *   z  = int Psi K p_u_bar dt
 *   a0 = -Phi(t_f, t0) K_x0 e_x0 - int Phi(t_f, s) K_f e_f ds
 *   G  = dg/dx_f,  c = G xdot(t_f) + dg/dt_f
 *
 * For multipliers pi (zero off the active set) the terminal rates are
 *
 *   dx_f = a0 - z - W G^T pi,  dt_f = -k_tf (p_tf + c^T pi),
 *   dg   = G dx_f + c dt_f.
 */
struct ReducedSystem
{
  int q_E = 0;
  int q_I = 0;
  Eigen::MatrixXd G;
  Eigen::VectorXd c;
  Eigen::VectorXd g;
  Eigen::MatrixXd W;
  Eigen::VectorXd z;
  Eigen::VectorXd a0;
  double p_tf = 0.0;
  double k_tf = 0.0;
  Eigen::MatrixXd K_gE;
  Eigen::VectorXd k_gI;
};

ReducedSystem reduceSystem(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                           const GainSet &gains, const SensitivityBundle &bundle);

/// M and r for the equalities plus the listed inequality indices.
LinearSystem assembleSystem(const ReducedSystem &sys, const std::vector<int> &active);

LinearSystem assembleSystem(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                            const GainSet &gains, const SensitivityBundle &bundle, const IndexSets &sets);

/// dg/dtau for every stacked constraint under the given full multiplier vector.
Eigen::VectorXd constraintRates(const ReducedSystem &sys, const Eigen::VectorXd &pi_E, const Eigen::VectorXd &pi_I);

struct MultiplierResult
{
  Eigen::VectorXd pi_E;
  Eigen::VectorXd pi_I;
  IndexSets sets;
  LinearSystem system;
  int solve_iterations = 0;
  bool used_enumeration = false;
};

inline constexpr double kMultiplierConditionLimit = 1e12;

/**
 * Active-set multiplier solve. Starts from I_p = I, drops the most negative
 * inequality multiplier until all are nonnegative, then re-adds any dropped
 * index whose decay inequality dg_i + k_i g_i <= 0 fails. Revisiting a set
 * switches to exhaustive enumeration over subsets of I.
 */
MultiplierResult solveActiveSet(const ReducedSystem &sys);

MultiplierResult solveActiveSet(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                                const GainSet &gains, const SensitivityBundle &bundle);

/// Exhaustive search over subsets of I; the reference for solveActiveSet.
MultiplierResult enumerateActiveSet(const ReducedSystem &sys);

} // namespace vem
