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

namespace vem
{

/// Uniform grid over [t0, t_f] parameterized by s_i = i / (N - 1). The node
/// count stays fixed while t_f moves.
struct Grid
{
  int N = 0;
  double t0 = 0.0;
  double tf = 0.0;
  double dt = 0.0;
  Eigen::VectorXd s;
  Eigen::VectorXd t;
};

/// Requires N >= 3 and tf > t0.
Grid makeGrid(int N, double t0, double tf);

// Per-node series are stored row-wise: row i holds the value at node i.

/// Second-order finite differences: central in the interior, three-point
/// one-sided at both ends.
Eigen::MatrixXd timeDerivative(const Eigen::MatrixXd &values, const Grid &grid);

/// Composite trapezoid over [t0, t_f], one entry per column.
Eigen::VectorXd trapezoid(const Eigen::MatrixXd &values, const Grid &grid);
double trapezoid(const Eigen::VectorXd &values, const Grid &grid);

/// Cumulative trapezoid, row i = integral over [t0, t_i]. The last row is
/// bitwise equal to trapezoid() of the same series.
Eigen::MatrixXd runningTrapezoid(const Eigen::MatrixXd &values, const Grid &grid);

} // namespace vem
