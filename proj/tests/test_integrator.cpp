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

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "vem/error.hpp"
#include "vem/integrator.hpp"

using namespace vem;

namespace
{

Eigen::VectorXd decay(double, const Eigen::VectorXd &y) { return -y; }

Eigen::VectorXd oscillator(double, const Eigen::VectorXd &y) { return Eigen::Vector2d(y(1), -y(0)); }

double periodError(double rtol)
{
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = rtol * 1e-3;
  cfg.tau_max = 2.0 * std::numbers::pi;
  cfg.sample_interval = cfg.tau_max;
  const IntegrationResult res = integrate(oscillator, Eigen::Vector2d(1.0, 0.0), cfg);
  EXPECT_TRUE(res.ok());
  return (res.y_final - Eigen::Vector2d(1.0, 0.0)).norm();
}

double fixedStepError(double h)
{
  IntegratorConfig cfg;
  cfg.adaptive = false;
  cfg.h0 = h;
  cfg.tau_max = 1.0;
  const IntegrationResult res = integrate(decay, Eigen::VectorXd::Ones(1), cfg);
  EXPECT_TRUE(res.ok());
  return std::abs(res.y_final(0) - std::exp(-1.0));
}

} // namespace

TEST(Rk45Step, ConstantSolution)
{
  IntegratorConfig cfg;
  auto zero = [](double, const Eigen::VectorXd &y) { return Eigen::VectorXd::Zero(y.size()).eval(); };
  const Eigen::VectorXd y = Eigen::Vector3d(1.0, -2.0, 3.5);
  for (double h : {1e-3, 0.5, 100.0})
  {
    const StepResult st = rk45Step(zero, y, Eigen::VectorXd::Zero(3), 0.0, h, cfg);
    EXPECT_TRUE(st.accepted);
    EXPECT_EQ(st.err_norm, 0.0);
    EXPECT_EQ(st.y_next, y);
    EXPECT_EQ(st.h_next, 5.0 * h);
  }
}

TEST(Rk45Step, StepControllerClamp)
{
  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-15;
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  const StepResult st = rk45Step(decay, y, -y, 0.0, 1.0, cfg);
  EXPECT_FALSE(st.accepted);
  EXPECT_GT(st.err_norm, 1.0);
  EXPECT_DOUBLE_EQ(st.h_next, 0.2);
}

TEST(Integrate, ExponentialDecay)
{
  IntegratorConfig cfg;
  cfg.tau_max = 1.0;
  const IntegrationResult res = integrate(decay, Eigen::VectorXd::Ones(1), cfg);
  ASSERT_TRUE(res.ok());
  EXPECT_NEAR(res.y_final(0), 0.36788, 1e-4);
  EXPECT_EQ(res.tau_final, 1.0);
}

TEST(Integrate, HarmonicOscillatorTolerance)
{
  const double e3 = periodError(1e-3);
  const double e4 = periodError(1e-4);
  EXPECT_LE(e3, 10 * 1e-3);
  EXPECT_GE(e3 / e4, 5.0);
}

TEST(Integrate, ZeroHorizon)
{
  IntegratorConfig cfg;
  cfg.tau_max = 0.0;
  const Eigen::VectorXd y0 = Eigen::Vector2d(0.25, -4.0);
  const IntegrationResult res = integrate(decay, y0, cfg);
  ASSERT_TRUE(res.ok());
  EXPECT_EQ(res.y_final, y0);
  ASSERT_EQ(res.samples.size(), 1u);
  EXPECT_EQ(res.samples[0].tau, 0.0);
  EXPECT_EQ(res.samples[0].y, y0);
  EXPECT_EQ(res.accepted_steps, 0);
}

TEST(Integrate, FifthOrderWithFixedSteps)
{
  const double e1 = fixedStepError(0.1);
  const double e2 = fixedStepError(0.05);
  const double e3 = fixedStepError(0.025);
  // Global error ~ h^5: each halving divides by 32, within a factor of 2.
  for (double ratio : {e1 / e2, e2 / e3})
  {
    EXPECT_GE(ratio, 16.0);
    EXPECT_LE(ratio, 64.0);
  }
}

TEST(Integrate, AcceptedStepsMeetTolerance)
{
  IntegratorConfig cfg;
  cfg.tau_max = 20.0;
  const IntegrationResult res = integrate(oscillator, Eigen::Vector2d(1.0, 0.0), cfg);
  ASSERT_TRUE(res.ok());
  EXPECT_GT(res.accepted_steps, 0);
  EXPECT_LE(res.max_accepted_err, 1.0);
}

TEST(Integrate, SamplesOnGridWithDenseOutput)
{
  IntegratorConfig cfg;
  cfg.tau_max = 7.5;
  cfg.sample_interval = 1.0;
  cfg.rtol = 1e-8;
  cfg.atol = 1e-10;
  std::vector<double> seen;
  const IntegrationResult res =
      integrate(decay, Eigen::VectorXd::Ones(1), cfg, [&](double tau, const Eigen::VectorXd &) { seen.push_back(tau); });
  ASSERT_TRUE(res.ok());
  ASSERT_EQ(res.samples.size(), 9u);
  EXPECT_EQ(seen.size(), 9u);
  for (std::size_t k = 0; k < 8; ++k)
    EXPECT_EQ(res.samples[k].tau, double(k));
  EXPECT_EQ(res.samples.back().tau, 7.5);
  // Cubic Hermite interpolation inside accepted steps.
  for (const Sample &s : res.samples)
    EXPECT_NEAR(s.y(0), std::exp(-s.tau), 1e-6) << "tau " << s.tau;
}

TEST(Integrate, Deterministic)
{
  IntegratorConfig cfg;
  cfg.tau_max = 30.0;
  const IntegrationResult a = integrate(oscillator, Eigen::Vector2d(1.0, 0.3), cfg);
  const IntegrationResult b = integrate(oscillator, Eigen::Vector2d(1.0, 0.3), cfg);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    EXPECT_EQ(std::memcmp(a.samples[k].y.data(), b.samples[k].y.data(), 2 * sizeof(double)), 0);
  EXPECT_EQ(a.accepted_steps, b.accepted_steps);
  EXPECT_EQ(a.rejected_steps, b.rejected_steps);
}

TEST(Integrate, RhsErrorKeepsPartialLog)
{
  IntegratorConfig cfg;
  cfg.tau_max = 10.0;
  auto rhs = [](double tau, const Eigen::VectorXd &y) -> Eigen::VectorXd {
    if (tau > 3.2)
      throw EvaluationError("bad state");
    return -y;
  };
  const IntegrationResult res = integrate(rhs, Eigen::VectorXd::Ones(1), cfg);
  ASSERT_FALSE(res.ok());
  EXPECT_THROW(std::rethrow_exception(res.error), EvaluationError);
  ASSERT_GE(res.samples.size(), 3u);
  EXPECT_LE(res.samples.back().tau, 3.2 + 1e-12);
}

TEST(Integrate, BlowUpIsStepFailure)
{
  // y' = y^2 from y = 1 has a pole at tau = 1.
  IntegratorConfig cfg;
  cfg.tau_max = 2.0;
  cfg.h_min = 1e-8;
  auto rhs = [](double, const Eigen::VectorXd &y) { return y.cwiseProduct(y).eval(); };
  const IntegrationResult res = integrate(rhs, Eigen::VectorXd::Ones(1), cfg);
  ASSERT_FALSE(res.ok());
  try
  {
    std::rethrow_exception(res.error);
  }
  catch (const StepFailureError &e)
  {
    EXPECT_LE(e.tau(), 1.0);
    EXPECT_GT(e.tau(), 0.9);
  }
  catch (const EvaluationError &)
  {
    // Non-finite stages are also a legitimate way to stop at the pole.
  }
  EXPECT_FALSE(res.samples.empty());
  EXPECT_EQ(res.samples.front().tau, 0.0);
}

TEST(IntegratorConfig, Validation)
{
  IntegratorConfig cfg;
  EXPECT_NO_THROW(checkIntegratorConfig(cfg));
  for (auto mutate : std::vector<std::function<void(IntegratorConfig &)>>{
           [](IntegratorConfig &c) { c.rtol = 0.0; },
           [](IntegratorConfig &c) { c.atol = -1.0; },
           [](IntegratorConfig &c) { c.tau_max = -1.0; },
           [](IntegratorConfig &c) { c.h_min = 0.0; },
           [](IntegratorConfig &c) { c.h_max = c.h_min / 2; },
           [](IntegratorConfig &c) { c.sample_interval = 0.0; },
       })
  {
    IntegratorConfig bad;
    mutate(bad);
    EXPECT_THROW(checkIntegratorConfig(bad), ConfigurationError);
  }
}
