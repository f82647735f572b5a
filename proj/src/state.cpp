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

#include "vem/state.hpp"

#include <string>

#include "vem/error.hpp"
#include "vem/mesh.hpp"

namespace vem
{

Eigen::Index packedSize(const ProblemDef &problem, int N)
{
  return static_cast<Eigen::Index>(N) * (problem.n + problem.m) + (problem.tf_free ? 1 : 0);
}

namespace
{

Eigen::VectorXd packBlocks(const ProblemDef &problem, const Eigen::MatrixXd &X, const Eigen::MatrixXd &U,
                           double tf)
{
  const Eigen::Index N = X.rows();
  if (X.cols() != problem.n || U.rows() != N || U.cols() != problem.m)
    throw ShapeError("cannot pack state blocks of mismatched shape");
  Eigen::VectorXd y(packedSize(problem, static_cast<int>(N)));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < problem.n; ++j)
      y(k++) = X(i, j);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < problem.m; ++j)
      y(k++) = U(i, j);
  if (problem.tf_free)
    y(k++) = tf;
  return y;
}

} // namespace

Eigen::VectorXd pack(const ProblemDef &problem, const SolutionState &state)
{
  return packBlocks(problem, state.X, state.U, state.tf);
}

Eigen::VectorXd pack(const ProblemDef &problem, const StateDerivative &rate)
{
  return packBlocks(problem, rate.dX, rate.dU, rate.dtf);
}

SolutionState unpack(const ProblemDef &problem, int N, const Eigen::VectorXd &y)
{
  if (y.size() != packedSize(problem, N))
    throw ShapeError("packed vector has length " + std::to_string(y.size()) + ", expected " +
                     std::to_string(packedSize(problem, N)));
  SolutionState s;
  s.X.resize(N, problem.n);
  s.U.resize(N, problem.m);
  Eigen::Index k = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < problem.n; ++j)
      s.X(i, j) = y(k++);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < problem.m; ++j)
      s.U(i, j) = y(k++);
  s.tf = problem.tf_free ? y(k) : problem.tf;
  return s;
}

SolutionState constantGuess(const ProblemDef &problem, int N, double tf, const Eigen::VectorXd &x_const,
                            const Eigen::VectorXd &u_const, const Eigen::VectorXd &u_slope)
{
  if (x_const.size() != problem.n || u_const.size() != problem.m || u_slope.size() != problem.m)
    throw ShapeError("initial guess does not match problem dimensions");
  const Grid grid = makeGrid(N, problem.t0, tf);
  SolutionState s;
  s.tf = tf;
  s.X = x_const.transpose().replicate(N, 1);
  s.U.resize(N, problem.m);
  for (int i = 0; i < N; ++i)
    s.U.row(i) = (u_const + u_slope * grid.t(i)).transpose();
  return s;
}

} // namespace vem
