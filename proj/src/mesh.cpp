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

#include "vem/mesh.hpp"

#include <cmath>
#include <string>

#include "vem/error.hpp"

namespace vem
{

namespace
{

void requireRows(const Eigen::MatrixXd &values, const Grid &grid)
{
  if (values.rows() != grid.N)
    throw ShapeError("series has " + std::to_string(values.rows()) + " nodes, grid has " +
                     std::to_string(grid.N));
}

} // namespace

Grid makeGrid(int N, double t0, double tf)
{
  if (N < 3)
    throw ConfigurationError("grid needs at least 3 nodes");
  if (!(tf > t0) || !std::isfinite(tf) || !std::isfinite(t0))
    throw ConfigurationError("grid needs finite tf > t0");

  Grid g;
  g.N = N;
  g.t0 = t0;
  g.tf = tf;
  g.dt = (tf - t0) / (N - 1);
  g.s.resize(N);
  g.t.resize(N);
  for (int i = 0; i < N; ++i)
  {
    g.s(i) = static_cast<double>(i) / (N - 1);
    g.t(i) = t0 + g.s(i) * (tf - t0);
  }
  return g;
}

Eigen::MatrixXd timeDerivative(const Eigen::MatrixXd &values, const Grid &grid)
{
  requireRows(values, grid);
  const int N = grid.N;
  const double inv2h = 1.0 / (2.0 * grid.dt);

  Eigen::MatrixXd d(values.rows(), values.cols());
  // One-sided stencils in difference form so constant series give exact zeros.
  d.row(0) = (4.0 * (values.row(1) - values.row(0)) - (values.row(2) - values.row(0))) * inv2h;
  for (int i = 1; i < N - 1; ++i)
    d.row(i) = (values.row(i + 1) - values.row(i - 1)) * inv2h;
  d.row(N - 1) = (4.0 * (values.row(N - 1) - values.row(N - 2)) - (values.row(N - 1) - values.row(N - 3))) * inv2h;
  return d;
}

Eigen::MatrixXd runningTrapezoid(const Eigen::MatrixXd &values, const Grid &grid)
{
  requireRows(values, grid);
  const double half = 0.5 * grid.dt;
  Eigen::MatrixXd out(values.rows(), values.cols());
  out.row(0).setZero();
  for (int i = 1; i < grid.N; ++i)
    out.row(i) = out.row(i - 1) + half * (values.row(i - 1) + values.row(i));
  return out;
}

Eigen::VectorXd trapezoid(const Eigen::MatrixXd &values, const Grid &grid)
{
  requireRows(values, grid);
  // Same accumulation order as runningTrapezoid.
  const double half = 0.5 * grid.dt;
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(values.cols());
  for (int i = 1; i < grid.N; ++i)
    acc = acc + half * (values.row(i - 1) + values.row(i));
  return acc.transpose();
}

double trapezoid(const Eigen::VectorXd &values, const Grid &grid)
{
  return trapezoid(Eigen::MatrixXd(values), grid)(0);
}

} // namespace vem
