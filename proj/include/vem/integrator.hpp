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

#include <exception>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace vem
{

struct IntegratorConfig
{
  double rtol = 1e-3;
  double atol = 1e-6;
  double tau_max = 300.0;
  double h0 = 1e-2;
  double h_min = 1e-10;
  double h_max = std::numeric_limits<double>::infinity();
  double sample_interval = 1.0;
  /// Fixed steps of size h0 when false (every step accepted).
  bool adaptive = true;
  /// Stop after this many attempted steps.
  long max_steps = 10'000'000;
};

/// Throws ConfigurationError when a field is out of range.
void checkIntegratorConfig(const IntegratorConfig &cfg);

using RhsFunction = std::function<Eigen::VectorXd(double tau, const Eigen::VectorXd &y)>;

struct StepResult
{
  Eigen::VectorXd y_next;
  Eigen::VectorXd f_next; // rhs at (tau + h, y_next), the first stage of the next step
  double h_next = 0.0;
  bool accepted = false;
  double err_norm = 0.0;
};

/**
 * One Dormand-Prince 5(4) step. The error norm is
 *   max_i |e_i| / (atol + rtol * max(|y_i|, |y_next_i|)),
 * the step is accepted when it is <= 1, and h_next = h * clamp(0.9 err^{-1/5}, 0.2, 5).
 * f0 is rhs(tau, y) (first-same-as-last reuse).
 */
StepResult rk45Step(const RhsFunction &rhs, const Eigen::VectorXd &y, const Eigen::VectorXd &f0, double tau,
                    double h, const IntegratorConfig &cfg);

struct Sample
{
  double tau = 0.0;
  Eigen::VectorXd y;
};

struct IntegrationResult
{
  Eigen::VectorXd y_final;
  std::vector<Sample> samples;
  double tau_final = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  long rhs_evaluations = 0;
  double max_accepted_err = 0.0;
  /// Set when the run aborted; samples up to the failure are kept.
  std::exception_ptr error;

  bool ok() const { return !error; }
};

/// Called at tau = 0, sample_interval, 2*sample_interval, ... and tau_max
/// with dense-output states.
using SampleCallback = std::function<void(double tau, const Eigen::VectorXd &y)>;

/// Integrates from tau = 0 to tau_max. Errors from rhs or step control end
/// the run and are stored in the result instead of propagating.
IntegrationResult integrate(const RhsFunction &rhs, const Eigen::VectorXd &y0, const IntegratorConfig &cfg,
                            const SampleCallback &on_sample = {});

} // namespace vem
