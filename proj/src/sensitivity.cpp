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

#include "vem/sensitivity.hpp"

#include <string>

#include "vem/error.hpp"

namespace vem
{

SensitivityBundle computeBaseSensitivities(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                                           const TransitionSet &ts)
{
  const int N = grid.N;
  const int n = problem.n;
  const int m = problem.m;
  if (state.nodes() != N || state.X.cols() != n || state.U.cols() != m)
    throw ShapeError("state does not match problem and grid");
  if (ts.nodes() != N)
    throw ShapeError("transition set does not match grid");

  SensitivityBundle b;
  b.xdot = timeDerivative(state.X, grid);
  b.udot = timeDerivative(state.U, grid);
  b.f.resize(N, n);
  b.f_x.resize(N);
  b.f_u.resize(N);
  b.L.resize(N);
  b.phi_x.resize(N, n);
  b.q.resize(N, n);
  Eigen::MatrixXd L_u(N, m);

  for (int i = 0; i < N; ++i)
  {
    const Eigen::VectorXd x = state.X.row(i).transpose();
    const Eigen::VectorXd u = state.U.row(i).transpose();
    const double t = grid.t(i);
    try
    {
      b.f.row(i) = evalDynamics(problem, x, u, t).transpose();
      DynamicsJacobians jac = evalJacobians(problem, x, u, t);
      const RunningCost rc = evalRunningCost(problem, x, u, t);
      const MayerTerm mt = evalMayer(problem, x, t);

      const Eigen::VectorXd xd = b.xdot.row(i).transpose();
      b.q.row(i) = (rc.L_x + mt.phi_tx + mt.phi_xx.transpose() * xd + jac.f_x.transpose() * mt.phi_x).transpose();
      b.L(i) = rc.L;
      L_u.row(i) = rc.L_u.transpose();
      b.phi_x.row(i) = mt.phi_x.transpose();
      if (i == N - 1)
        b.p_tf = rc.L + mt.phi_t + mt.phi_x.dot(xd);
      b.f_x[i] = std::move(jac.f_x);
      b.f_u[i] = std::move(jac.f_u);
    }
    catch (const Error &e)
    {
      throw EvaluationError("node " + std::to_string(i) + ": " + e.what());
    }
  }

  b.e_f = b.xdot - b.f;
  b.e_x0 = state.X.row(0).transpose() - problem.x0;

  // w_i = Phi(t0, t_i)^T int_{t_i}^{t_f} Phi(sigma, t0)^T q(sigma) dsigma,
  // accumulated backwards so that w(t_f) = 0 exactly.
  Eigen::MatrixXd h(N, n);
  for (int j = 0; j < N; ++j)
    h.row(j) = (ts.fromStart(j).transpose() * b.q.row(j).transpose()).transpose();
  Eigen::MatrixXd tail(N, n);
  tail.row(N - 1).setZero();
  const double half = 0.5 * grid.dt;
  for (int j = N - 2; j >= 0; --j)
    tail.row(j) = tail.row(j + 1) + half * (h.row(j) + h.row(j + 1));

  b.w.resize(N, n);
  b.p_u_bar.resize(N, m);
  b.p_f.resize(N, n);
  b.p_x0 = h;
  for (int i = 0; i < N; ++i)
  {
    b.w.row(i) = (ts.toStart(i).transpose() * tail.row(i).transpose()).transpose();
    b.p_f.row(i) = b.phi_x.row(i) + b.w.row(i);
    b.p_u_bar.row(i) = L_u.row(i) + (b.f_u[i].transpose() * b.p_f.row(i).transpose()).transpose();
  }
  b.w.row(N - 1).setZero();

  const Eigen::VectorXd xf = state.X.row(N - 1).transpose();
  try
  {
    b.g_E = evalTerminalEq(problem, xf, grid.tf);
    b.g_I = evalTerminalIneq(problem, xf, grid.tf);
  }
  catch (const Error &e)
  {
    throw EvaluationError(std::string("terminal constraints: ") + e.what());
  }

  b.p_u_bar_tc = b.p_u_bar;
  b.p_tf_tc = b.p_tf;
  return b;
}

Eigen::VectorXd terminalAdjoint(const SensitivityBundle &bundle, const Eigen::VectorXd &pi_E,
                                const Eigen::VectorXd &pi_I)
{
  const Eigen::Index n = bundle.xdot.cols();
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
  if (pi_E.size() > 0)
    nu += bundle.g_E.g_x.transpose() * pi_E;
  if (pi_I.size() > 0)
    nu += bundle.g_I.g_x.transpose() * pi_I;
  return nu;
}

void applyMultipliers(SensitivityBundle &bundle, const TransitionSet &ts, const Eigen::VectorXd &pi_E,
                      const Eigen::VectorXd &pi_I)
{
  const int N = static_cast<int>(bundle.xdot.rows());
  if (pi_E.size() != bundle.g_E.g.size() || pi_I.size() != bundle.g_I.g.size())
    throw ShapeError("multiplier lengths do not match terminal constraints");

  // Phi(t_f, t_i)^T nu = Phi(t0, t_i)^T Phi(t_f, t0)^T nu
  const Eigen::VectorXd nu = terminalAdjoint(bundle, pi_E, pi_I);
  const Eigen::VectorXd nu0 = ts.fromStart(N - 1).transpose() * nu;
  bundle.p_u_bar_tc.resize(bundle.p_u_bar.rows(), bundle.p_u_bar.cols());
  for (int i = 0; i < N; ++i)
  {
    const Eigen::VectorXd lam = ts.toStart(i).transpose() * nu0;
    bundle.p_u_bar_tc.row(i) = bundle.p_u_bar.row(i) + (bundle.f_u[i].transpose() * lam).transpose();
  }

  const Eigen::VectorXd xf = bundle.xdot.row(N - 1).transpose();
  double ptf = bundle.p_tf;
  if (pi_E.size() > 0)
    ptf += pi_E.dot(bundle.g_E.g_x * xf + bundle.g_E.g_t);
  if (pi_I.size() > 0)
    ptf += pi_I.dot(bundle.g_I.g_x * xf + bundle.g_I.g_t);
  bundle.p_tf_tc = ptf;
}

} // namespace vem
