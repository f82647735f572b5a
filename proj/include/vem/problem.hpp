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

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vem
{

struct DynamicsJacobians
{
  Eigen::MatrixXd f_x; // n x n
  Eigen::MatrixXd f_u; // n x m
};

struct RunningCost
{
  double L = 0.0;
  Eigen::VectorXd L_x;
  Eigen::VectorXd L_u;
};

/// Mayer term phi(x, t) with the derivatives the sensitivity kernels need.
/// The solver evaluates it along the whole trajectory, not only at t_f.
struct MayerTerm
{
  double phi = 0.0;
  Eigen::VectorXd phi_x;
  double phi_t = 0.0;
  Eigen::MatrixXd phi_xx;
  Eigen::VectorXd phi_tx;
};

/// Terminal constraint values g(x_f, t_f) and their Jacobians.
struct TerminalConstraint
{
  Eigen::VectorXd g;
  Eigen::MatrixXd g_x; // q x n
  Eigen::VectorXd g_t; // q
};

/**
 * One optimal control problem with terminal equality and inequality
 * constraints:
 *
 *   min  phi(x(t_f), t_f) + int_{t0}^{t_f} L(x, u, t) dt
 *   s.t. xdot = f(x, u, t),  x(t0) = x0,
 *        g_E(x(t_f), t_f) = 0,  g_I(x(t_f), t_f) <= 0.
 *
 * Callbacks must be pure; the right-hand side calls them in arbitrary order.
 */
struct ProblemDef
{
  std::string name;

  int n = 0;
  int m = 0;
  int q_E = 0;
  int q_I = 0;

  double t0 = 0.0;
  Eigen::VectorXd x0;
  bool tf_free = false;
  double tf = 1.0; // terminal time when fixed, nominal guess otherwise

  std::function<Eigen::VectorXd(const Eigen::VectorXd &, const Eigen::VectorXd &, double)> dynamics;
  std::function<DynamicsJacobians(const Eigen::VectorXd &, const Eigen::VectorXd &, double)> dynamics_jacobians;
  std::function<RunningCost(const Eigen::VectorXd &, const Eigen::VectorXd &, double)> running_cost;
  std::function<MayerTerm(const Eigen::VectorXd &, double)> mayer_term;
  std::function<TerminalConstraint(const Eigen::VectorXd &, double)> terminal_eq;
  std::function<TerminalConstraint(const Eigen::VectorXd &, double)> terminal_ineq;
};

/// Throws ConfigurationError when dimensions or callbacks are missing.
void checkProblem(const ProblemDef &problem);

Eigen::VectorXd evalDynamics(const ProblemDef &problem, const Eigen::VectorXd &x,
                             const Eigen::VectorXd &u, double t);

DynamicsJacobians evalJacobians(const ProblemDef &problem, const Eigen::VectorXd &x,
                                const Eigen::VectorXd &u, double t);

RunningCost evalRunningCost(const ProblemDef &problem, const Eigen::VectorXd &x,
                            const Eigen::VectorXd &u, double t);

MayerTerm evalMayer(const ProblemDef &problem, const Eigen::VectorXd &x, double t);

TerminalConstraint evalTerminalEq(const ProblemDef &problem, const Eigen::VectorXd &x, double t);

TerminalConstraint evalTerminalIneq(const ProblemDef &problem, const Eigen::VectorXd &x, double t);

/// xdot = A x + b u, A = [0 1; 0 0], b = [0; 1], L = u^2/2, x(0) = [1, 1],
/// x(2) = [0, 0], fixed t_f = 2.
ProblemDef builtinDoubleIntegrator();

/// Minimum-time descent: x = [x, y, V], f = [V sin u, -V cos u, g cos u],
/// g = 10, phi = t_f, x(t_f) = 2, y(t_f) <= y_bound, x(0) = 0, free t_f.
ProblemDef builtinBrachistochrone(double y_bound);

/// Looks up a builtin by the name used in run configurations.
ProblemDef builtinProblem(const std::string &name, double y_bound = -2.0);

inline constexpr double kBrachistochroneGravity = 10.0;

struct JacobianSample
{
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  double t = 0.0;
};

struct JacobianCheck
{
  std::string callback;
  double max_discrepancy = 0.0;
  bool passed = true;
};

struct JacobianReport
{
  double threshold = 1e-5;
  std::vector<JacobianCheck> checks;

  bool passed() const;
  double maxDiscrepancy() const;
  const JacobianCheck &check(const std::string &callback) const;
};

/**
 * Compares every analytic derivative against central finite differences
 * with step 1e-6 * (1 + |z|). The discrepancy is |analytic - fd| / (1 + |fd|),
 * maximized over samples and entries.
 */
JacobianReport validateJacobians(const ProblemDef &problem, const std::vector<JacobianSample> &samples,
                                 double threshold = 1e-5);

} // namespace vem
