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

#include "vem/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vem/error.hpp"

namespace vem
{

namespace
{

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;

// 5th-order minus 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

// Cubic Hermite interpolation on [t0, t0 + h] from endpoint values and slopes.
Eigen::VectorXd hermite(const Eigen::VectorXd &y0, const Eigen::VectorXd &f0, const Eigen::VectorXd &y1,
                        const Eigen::VectorXd &f1, double h, double theta)
{
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + theta;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

} // namespace

void checkIntegratorConfig(const IntegratorConfig &cfg)
{
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
    throw ConfigurationError("rtol and atol must be positive");
  if (!(cfg.h_min > 0.0) || !(cfg.h_min <= cfg.h_max))
    throw ConfigurationError("need 0 < h_min <= h_max");
  if (!(cfg.tau_max >= 0.0) || !std::isfinite(cfg.tau_max))
    throw ConfigurationError("tau_max must be finite and nonnegative");
  if (!(cfg.h0 > 0.0))
    throw ConfigurationError("h0 must be positive");
  if (!(cfg.sample_interval > 0.0))
    throw ConfigurationError("sample_interval must be positive");
}

StepResult rk45Step(const RhsFunction &rhs, const Eigen::VectorXd &y, const Eigen::VectorXd &f0, double tau,
                    double h, const IntegratorConfig &cfg)
{
  const Eigen::VectorXd &k1 = f0;
  const Eigen::VectorXd k2 = rhs(tau + c2 * h, y + h * (a21 * k1));
  const Eigen::VectorXd k3 = rhs(tau + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const Eigen::VectorXd k4 = rhs(tau + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Eigen::VectorXd k5 = rhs(tau + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Eigen::VectorXd k6 = rhs(tau + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));

  StepResult out;
  out.y_next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  out.f_next = rhs(tau + h, out.y_next);
  const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.f_next);

  double norm = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
  {
    const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y(i)), std::abs(out.y_next(i)));
    norm = std::max(norm, std::abs(err(i)) / scale);
  }
  if (!std::isfinite(norm))
    norm = std::numeric_limits<double>::infinity();
  out.err_norm = norm;
  out.accepted = norm <= 1.0;

  double factor = kMaxFactor;
  if (norm > 0.0)
    factor = std::clamp(kSafety * std::pow(norm, -0.2), kMinFactor, kMaxFactor);
  out.h_next = h * factor;
  return out;
}

IntegrationResult integrate(const RhsFunction &rhs, const Eigen::VectorXd &y0, const IntegratorConfig &cfg,
                            const SampleCallback &on_sample)
{
  IntegrationResult res;
  res.y_final = y0;

  // k * sample_interval for every k below tau_max, then tau_max itself.
  std::vector<double> sample_taus;
  std::size_t next_sample = 0;
  auto emit = [&](double tau, const Eigen::VectorXd &y) {
    res.samples.push_back({tau, y});
    if (on_sample)
      on_sample(tau, y);
  };
  // Samples in (tau_lo, tau_hi] come from dense output over the step.
  auto emitThrough = [&](double tau_lo, const Eigen::VectorXd &y_lo, const Eigen::VectorXd &f_lo, double tau_hi,
                         const Eigen::VectorXd &y_hi, const Eigen::VectorXd &f_hi) {
    const double h = tau_hi - tau_lo;
    for (; next_sample < sample_taus.size() && sample_taus[next_sample] <= tau_hi; ++next_sample)
    {
      const double ts = sample_taus[next_sample];
      if (ts == tau_hi)
        emit(ts, y_hi);
      else
        emit(ts, hermite(y_lo, f_lo, y_hi, f_hi, h, (ts - tau_lo) / h));
    }
  };

  try
  {
    checkIntegratorConfig(cfg);
    const double snap = 1e-12 * std::max(1.0, cfg.tau_max);
    for (long k = 0;; ++k)
    {
      const double ts = static_cast<double>(k) * cfg.sample_interval;
      if (ts >= cfg.tau_max - snap)
        break;
      sample_taus.push_back(ts);
    }
    sample_taus.push_back(cfg.tau_max);
    emit(0.0, y0);
    next_sample = 1;
    if (cfg.tau_max == 0.0)
      return res;

    double tau = 0.0;
    Eigen::VectorXd y = y0;
    Eigen::VectorXd f = rhs(tau, y);
    res.rhs_evaluations = 1;
    double h = std::min(cfg.h0, cfg.h_max);
    long attempts = 0;

    while (tau < cfg.tau_max)
    {
      if (++attempts > cfg.max_steps)
        throw StepFailureError("step budget exhausted", tau, 0.0);

      const bool final_step = tau + h >= cfg.tau_max;
      const double step = final_step ? cfg.tau_max - tau : h;
      StepResult sr = rk45Step(rhs, y, f, tau, step, cfg);
      res.rhs_evaluations += 6;

      if (!cfg.adaptive || sr.accepted)
      {
        const double tau_next = final_step ? cfg.tau_max : tau + step;
        emitThrough(tau, y, f, tau_next, sr.y_next, sr.f_next);
        tau = tau_next;
        y = std::move(sr.y_next);
        f = std::move(sr.f_next);
        res.y_final = y;
        res.tau_final = tau;
        ++res.accepted_steps;
        res.max_accepted_err = std::max(res.max_accepted_err, sr.err_norm);
        if (cfg.adaptive && !final_step)
          h = std::clamp(sr.h_next, cfg.h_min, cfg.h_max);
      }
      else
      {
        ++res.rejected_steps;
        if (sr.h_next < cfg.h_min)
        {
          std::ostringstream os;
          os << "step size fell below h_min at tau = " << tau << " (err = " << sr.err_norm << ")";
          throw StepFailureError(os.str(), tau, sr.err_norm);
        }
        h = sr.h_next;
      }
    }
  }
  catch (...)
  {
    res.error = std::current_exception();
  }
  return res;
}

} // namespace vem
