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

#include <stdexcept>
#include <string>

namespace vem
{

/// Base class for every error raised by the solver. The category decides the
/// process exit code used by the command line front end.
class Error : public std::runtime_error
{
public:
  enum class Category
  {
    Configuration,
    Numerical,
    Io
  };

  Error(Category category, const std::string &what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

private:
  Category category_;
};

class ConfigurationError : public Error
{
public:
  explicit ConfigurationError(const std::string &what)
      : Error(Category::Configuration, what) {}
};

class ShapeError : public Error
{
public:
  explicit ShapeError(const std::string &what)
      : Error(Category::Numerical, "shape error: " + what) {}
};

class EvaluationError : public Error
{
public:
  explicit EvaluationError(const std::string &what)
      : Error(Category::Numerical, "evaluation error: " + what) {}
};

/// A transition matrix Phi(t_j, t0) is too ill-conditioned to invert.
class IllConditionedTransitionError : public Error
{
public:
  explicit IllConditionedTransitionError(const std::string &what)
      : Error(Category::Numerical, "ill-conditioned transition: " + what) {}
};

/// The multiplier system M pi = -r has no reliable solution.
class ControllabilityError : public Error
{
public:
  explicit ControllabilityError(const std::string &what)
      : Error(Category::Numerical, "controllability error: " + what) {}
};

class DegenerateActiveSetError : public Error
{
public:
  explicit DegenerateActiveSetError(const std::string &what)
      : Error(Category::Numerical, "degenerate active set: " + what) {}
};

class StepFailureError : public Error
{
public:
  StepFailureError(const std::string &what, double tau, double err)
      : Error(Category::Numerical, "step failure: " + what), tau_(tau), err_(err) {}

  double tau() const noexcept { return tau_; }
  double errNorm() const noexcept { return err_; }

private:
  double tau_;
  double err_;
};

class IoError : public Error
{
public:
  explicit IoError(const std::string &what)
      : Error(Category::Io, "I/O error: " + what) {}
};

} // namespace vem
