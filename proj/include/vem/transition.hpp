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

namespace vem
{

inline constexpr double kTransitionConditionLimit = 1e12;

/**
 * State transition matrices Phi(t_i, t0) along the current trajectory.
 *
 * Phi(t_i, t_j) is composed as phi0[i] * inverse(phi0[j]). The inverses are
 * factored once (pivoted LU) when the set is built, so kernels that sweep
 * over node pairs can pull the node-dependent factor out of the quadrature.
 */
class TransitionSet
{
public:
  TransitionSet() = default;

  /// Takes ownership of phi0 and factors every entry. Throws
  /// IllConditionedTransitionError if any condition estimate exceeds the limit.
  explicit TransitionSet(std::vector<Eigen::MatrixXd> phi0);

  int nodes() const { return static_cast<int>(phi0_.size()); }
  int dim() const { return phi0_.empty() ? 0 : static_cast<int>(phi0_.front().rows()); }

  /// Phi(t_i, t0)
  const Eigen::MatrixXd &fromStart(int i) const { return phi0_[i]; }
  /// Phi(t_i, t0)^{-1} = Phi(t0, t_i)
  const Eigen::MatrixXd &toStart(int i) const { return inv0_[i]; }

  /// Phi(t_i, t_j); identity when i == j.
  Eigen::MatrixXd between(int i, int j) const;

  /// Largest condition-number estimate met while inverting phi0 entries.
  double condMax() const { return cond_max_; }

  const std::vector<Eigen::MatrixXd> &phi0() const { return phi0_; }

private:
  std::vector<Eigen::MatrixXd> phi0_;
  std::vector<Eigen::MatrixXd> inv0_;
  double cond_max_ = 1.0;
};

/// Integrates dPhi/dt = A(t) Phi from the identity with one classical RK4 step
/// per grid interval; A at the interval midpoint is the mean of the nodal
/// values. fx[i] is the state Jacobian at node i.
TransitionSet propagateTransitions(const std::vector<Eigen::MatrixXd> &fx, const Grid &grid);

/// Same, with f_x evaluated along the current (possibly infeasible) trajectory.
TransitionSet propagateTransitions(const ProblemDef &problem, const SolutionState &state, const Grid &grid);

} // namespace vem
