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

#include "vem/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "vem/error.hpp"

namespace vem
{

double performanceIndex(const ProblemDef &problem, const SolutionState &state, const Grid &grid)
{
  const int N = grid.N;
  Eigen::VectorXd L(N);
  for (int i = 0; i < N; ++i)
    L(i) = evalRunningCost(problem, state.X.row(i).transpose(), state.U.row(i).transpose(), grid.t(i)).L;
  const double phi = evalMayer(problem, state.X.row(N - 1).transpose(), grid.tf).phi;
  return phi + trapezoid(L, grid);
}

std::vector<double> lyapunovRatios(const ProblemDef &problem, const GainSet &gains, double horizon, double d1,
                                   double d2, double d3, double d4)
{
  std::vector<double> ratios;
  const auto [kf_min, kf_max] = symmetricEigenRange(gains.K_f);
  const auto [kx_min, kx_max] = symmetricEigenRange(gains.K_x0);
  ratios.push_back(kf_min / (d1 * kf_max * horizon));
  ratios.push_back(kx_min / (d2 * kx_max * horizon * horizon));
  if (problem.q_E > 0)
  {
    const auto [ke_min, ke_max] = symmetricEigenRange(gains.K_gE);
    ratios.push_back(ke_min / (d3 * ke_max));
  }
  if (problem.q_I > 0)
    ratios.push_back(gains.k_gI.minCoeff() / (d4 * gains.k_gI.maxCoeff()));
  return ratios;
}

LyapunovConfig lyapunovConstants(const ProblemDef &problem, const GainSet &gains, double horizon, double d1,
                                 double d2, double d3, double d4)
{
  LyapunovConfig cfg;
  cfg.d1 = d1;
  cfg.d2 = d2;
  cfg.d3 = d3;
  cfg.d4 = d4;
  const std::vector<double> ratios = lyapunovRatios(problem, gains, horizon, d1, d2, d3, d4);
  cfg.c1 = 0.5 * *std::min_element(ratios.begin(), ratios.end());
  const double k_tf = problem.tf_free ? gains.k_tf : 0.0;
  if (k_tf > 0.0)
    cfg.c2 = 2.0 * k_tf / (2.0 * cfg.c1 * symmetricEigenRange(gains.K_f).first);
  else
    cfg.c2 = 1.0;
  return cfg;
}

LyapunovConfig calibrateLyapunov(const ProblemDef &problem, const SolutionState &state, const GainSet &gains,
                                 const EvolutionOptions &options)
{
  const EvolutionEval ev = evaluateEvolution(problem, state, gains, options);
  const SensitivityBundle &b = ev.bundle;
  double pf = 0.0;
  double px0 = 0.0;
  for (Eigen::Index i = 0; i < b.p_f.rows(); ++i)
  {
    pf = std::max(pf, b.p_f.row(i).norm());
    px0 = std::max(px0, b.p_x0.row(i).norm());
  }
  auto bound = [](double v) { return std::max(1.0, 10.0 * v); };
  return lyapunovConstants(problem, gains, ev.grid.tf - ev.grid.t0, bound(pf), bound(px0),
                           bound(ev.multipliers.pi_E.norm()), bound(ev.multipliers.pi_I.norm()));
}

namespace
{

double violatedNorm(const Eigen::VectorXd &g_I)
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < g_I.size(); ++i)
    if (g_I(i) >= 0.0)
      s += g_I(i) * g_I(i);
  return std::sqrt(s);
}

double dynamicsErrorIntegral(const Eigen::MatrixXd &e_f, const Grid &grid)
{
  return trapezoid(Eigen::VectorXd(e_f.rowwise().norm()), grid);
}

} // namespace

double lyapunovValue(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                     const LyapunovConfig &cfg)
{
  const int N = grid.N;
  const Eigen::MatrixXd xdot = timeDerivative(state.X, grid);
  Eigen::MatrixXd e_f(N, problem.n);
  for (int i = 0; i < N; ++i)
    e_f.row(i) = xdot.row(i) - evalDynamics(problem, state.X.row(i).transpose(), state.U.row(i).transpose(),
                                            grid.t(i)).transpose();
  const Eigen::VectorXd xf = state.X.row(N - 1).transpose();
  const double e_x0 = (state.X.row(0).transpose() - problem.x0).norm();
  const double gE = evalTerminalEq(problem, xf, grid.tf).g.norm();
  const double gI = violatedNorm(evalTerminalIneq(problem, xf, grid.tf).g);
  const double J = performanceIndex(problem, state, grid);
  return e_x0 + dynamicsErrorIntegral(e_f, grid) + gE + gI + cfg.c1 * J +
         0.5 * cfg.c2 * e_f.row(N - 1).squaredNorm();
}

std::pair<double, double> optimalityResiduals(const ProblemDef &problem, const SensitivityBundle &bundle,
                                              const Grid &grid)
{
  const double pu = trapezoid(Eigen::VectorXd(bundle.p_u_bar_tc.rowwise().norm()), grid);
  const double ptf = problem.tf_free ? std::abs(bundle.p_tf_tc) : 0.0;
  return {pu, ptf};
}

Eigen::MatrixXd reconstructCostates(const ProblemDef &problem, const SolutionState &state, const Grid &grid,
                                    const TransitionSet &ts, const Eigen::VectorXd &pi_E,
                                    const Eigen::VectorXd &pi_I)
{
  SensitivityBundle b = computeBaseSensitivities(problem, state, grid, ts);
  const int N = grid.N;
  const Eigen::VectorXd nu0 = ts.fromStart(N - 1).transpose() * terminalAdjoint(b, pi_E, pi_I);
  Eigen::MatrixXd lambda(N, problem.n);
  for (int i = 0; i < N; ++i)
    lambda.row(i) = b.p_f.row(i) + (ts.toStart(i).transpose() * nu0).transpose();
  return lambda;
}

unsigned long DiagnosticsRecord::activeMask() const
{
  unsigned long mask = 0;
  for (int i : active_set)
    mask |= 1ul << i;
  return mask;
}

DiagnosticsRecord makeRecord(const ProblemDef &problem, const SolutionState &state, const EvolutionEval &eval,
                             const LyapunovConfig &lyap, double tau)
{
  const SensitivityBundle &b = eval.bundle;
  const Grid &grid = eval.grid;
  DiagnosticsRecord r;
  r.tau = tau;
  r.tf = grid.tf;
  r.J = performanceIndex(problem, state, grid);
  r.norm_e_x0 = b.e_x0.norm();
  r.norm_e_f_int = dynamicsErrorIntegral(b.e_f, grid);
  r.g_E = b.g_E.g;
  r.g_I = b.g_I.g;
  r.norm_g_E = b.g_E.g.norm();
  r.norm_g_I_violated = violatedNorm(b.g_I.g);
  r.V = r.norm_e_x0 + r.norm_e_f_int + r.norm_g_E + r.norm_g_I_violated + lyap.c1 * r.J +
        0.5 * lyap.c2 * b.e_f.row(grid.N - 1).squaredNorm();
  const auto [pu, ptf] = optimalityResiduals(problem, b, grid);
  r.norm_pu_tc = pu;
  r.abs_ptf_tc = ptf;
  r.rhs_norm = pack(problem, eval.rate).norm();
  r.pi_E = eval.multipliers.pi_E;
  r.pi_I = eval.multipliers.pi_I;
  r.active_set = eval.multipliers.sets.active;
  return r;
}

} // namespace vem
