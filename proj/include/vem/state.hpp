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

#include "vem/problem.hpp"

namespace vem
{

/// The evolving unknowns: node states X (N x n), node controls U (N x m) and
/// the terminal time. The packed layout is [X row-major, U row-major, t_f?].
struct SolutionState
{
  Eigen::MatrixXd X;
  Eigen::MatrixXd U;
  double tf = 0.0;

  int nodes() const { return static_cast<int>(X.rows()); }
};

/// Rates of the unknowns in variation time; packs like SolutionState.
struct StateDerivative
{
  Eigen::MatrixXd dX;
  Eigen::MatrixXd dU;
  double dtf = 0.0;
};

Eigen::Index packedSize(const ProblemDef &problem, int N);

Eigen::VectorXd pack(const ProblemDef &problem, const SolutionState &state);
Eigen::VectorXd pack(const ProblemDef &problem, const StateDerivative &rate);

/// For fixed-t_f problems the terminal time comes from problem.tf.
SolutionState unpack(const ProblemDef &problem, int N, const Eigen::VectorXd &y);

/// x(t) == x_const, u(t) = u_const + u_slope * t on a uniform grid over [t0, tf].
SolutionState constantGuess(const ProblemDef &problem, int N, double tf, const Eigen::VectorXd &x_const,
                            const Eigen::VectorXd &u_const, const Eigen::VectorXd &u_slope);

} // namespace vem
