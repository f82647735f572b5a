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

#include "vem/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vem/error.hpp"

namespace vem
{

TransitionSet::TransitionSet(std::vector<Eigen::MatrixXd> phi0) : phi0_(std::move(phi0))
{
  inv0_.reserve(phi0_.size());
  for (std::size_t i = 0; i < phi0_.size(); ++i)
  {
    const Eigen::MatrixXd &p = phi0_[i];
    if (i == 0 && p.isIdentity(0.0))
    {
      inv0_.push_back(p);
      continue;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(p);
    // rcond() is a 1-norm reciprocal condition estimate.
    const double rc = lu.rcond();
    const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    cond_max_ = std::max(cond_max_, cond);
    if (!(cond <= kTransitionConditionLimit))
      throw IllConditionedTransitionError("Phi(t_" + std::to_string(i) + ", t0) condition estimate " +
                                          std::to_string(cond));
    inv0_.push_back(lu.inverse());
  }
}

Eigen::MatrixXd TransitionSet::between(int i, int j) const
{
  if (i == j)
    return Eigen::MatrixXd::Identity(dim(), dim());
  return phi0_[i] * inv0_[j];
}

TransitionSet propagateTransitions(const std::vector<Eigen::MatrixXd> &fx, const Grid &grid)
{
  if (static_cast<int>(fx.size()) != grid.N)
    throw ShapeError("propagateTransitions needs one f_x per node");
  const Eigen::Index n = fx.front().rows();
  const double h = grid.dt;
  if (!fx[0].allFinite())
    throw EvaluationError("f_x non-finite at node 0");

  std::vector<Eigen::MatrixXd> phi(grid.N);
  phi[0] = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < grid.N; ++i)
  {
    if (!fx[i + 1].allFinite())
      throw EvaluationError("f_x non-finite at node " + std::to_string(i + 1));
    const Eigen::MatrixXd &a0 = fx[i];
    const Eigen::MatrixXd &a1 = fx[i + 1];
    const Eigen::MatrixXd am = 0.5 * (a0 + a1);
    const Eigen::MatrixXd &p = phi[i];

    const Eigen::MatrixXd k1 = a0 * p;
    const Eigen::MatrixXd k2 = am * (p + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = am * (p + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = a1 * (p + h * k3);
    phi[i + 1] = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return TransitionSet(std::move(phi));
}

TransitionSet propagateTransitions(const ProblemDef &problem, const SolutionState &state, const Grid &grid)
{
  if (state.nodes() != grid.N)
    throw ShapeError("state and grid node counts differ");
  std::vector<Eigen::MatrixXd> fx(grid.N);
  for (int i = 0; i < grid.N; ++i)
  {
    try
    {
      fx[i] = evalJacobians(problem, state.X.row(i).transpose(), state.U.row(i).transpose(), grid.t(i)).f_x;
    }
    catch (const Error &e)
    {
      throw EvaluationError("node " + std::to_string(i) + ": " + e.what());
    }
  }
  return propagateTransitions(fx, grid);
}

} // namespace vem
