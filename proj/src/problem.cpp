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

#include "vem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vem/error.hpp"

namespace vem
{

namespace
{

void requireSize(const Eigen::VectorXd &v, int expected, const char *what)
{
  if (v.size() != expected)
  {
    std::ostringstream os;
    os << what << " has length " << v.size() << ", expected " << expected;
    throw ShapeError(os.str());
  }
}

void requireShape(const Eigen::MatrixXd &a, int rows, int cols, const char *what)
{
  if (a.rows() != rows || a.cols() != cols)
  {
    std::ostringstream os;
    os << what << " is " << a.rows() << "x" << a.cols() << ", expected " << rows << "x" << cols;
    throw ShapeError(os.str());
  }
}

void requireFinite(const Eigen::MatrixXd &a, const char *what)
{
  if (!a.allFinite())
    throw EvaluationError(std::string(what) + " returned a non-finite value");
}

void requireFinite(double v, const char *what)
{
  if (!std::isfinite(v))
    throw EvaluationError(std::string(what) + " returned a non-finite value");
}

TerminalConstraint emptyConstraint(int n)
{
  return {Eigen::VectorXd(0), Eigen::MatrixXd(0, n), Eigen::VectorXd(0)};
}

void checkConstraint(const TerminalConstraint &c, int q, int n, const char *what)
{
  requireSize(c.g, q, what);
  requireShape(c.g_x, q, n, what);
  requireSize(c.g_t, q, what);
  requireFinite(c.g, what);
  requireFinite(c.g_x, what);
  requireFinite(c.g_t, what);
}

} // namespace

void checkProblem(const ProblemDef &problem)
{
  if (problem.n < 1 || problem.m < 1 || problem.q_E < 0 || problem.q_I < 0)
    throw ConfigurationError("problem '" + problem.name + "' has invalid dimensions");
  if (problem.x0.size() != problem.n)
    throw ConfigurationError("problem '" + problem.name + "' x0 length does not match n");
  if (!problem.dynamics || !problem.dynamics_jacobians || !problem.running_cost || !problem.mayer_term)
    throw ConfigurationError("problem '" + problem.name + "' is missing a callback");
  if (problem.q_E > 0 && !problem.terminal_eq)
    throw ConfigurationError("problem '" + problem.name + "' declares q_E > 0 without terminal_eq");
  if (problem.q_I > 0 && !problem.terminal_ineq)
    throw ConfigurationError("problem '" + problem.name + "' declares q_I > 0 without terminal_ineq");
  if (!(problem.tf > problem.t0))
    throw ConfigurationError("problem '" + problem.name + "' needs tf > t0");
}

Eigen::VectorXd evalDynamics(const ProblemDef &problem, const Eigen::VectorXd &x,
                             const Eigen::VectorXd &u, double t)
{
  requireSize(x, problem.n, "state");
  requireSize(u, problem.m, "control");
  Eigen::VectorXd f = problem.dynamics(x, u, t);
  requireSize(f, problem.n, "dynamics");
  requireFinite(f, "dynamics");
  return f;
}

DynamicsJacobians evalJacobians(const ProblemDef &problem, const Eigen::VectorXd &x,
                                const Eigen::VectorXd &u, double t)
{
  requireSize(x, problem.n, "state");
  requireSize(u, problem.m, "control");
  DynamicsJacobians jac = problem.dynamics_jacobians(x, u, t);
  requireShape(jac.f_x, problem.n, problem.n, "f_x");
  requireShape(jac.f_u, problem.n, problem.m, "f_u");
  requireFinite(jac.f_x, "dynamics_jacobians");
  requireFinite(jac.f_u, "dynamics_jacobians");
  return jac;
}

RunningCost evalRunningCost(const ProblemDef &problem, const Eigen::VectorXd &x,
                            const Eigen::VectorXd &u, double t)
{
  requireSize(x, problem.n, "state");
  requireSize(u, problem.m, "control");
  RunningCost c = problem.running_cost(x, u, t);
  requireSize(c.L_x, problem.n, "L_x");
  requireSize(c.L_u, problem.m, "L_u");
  requireFinite(c.L, "running_cost");
  requireFinite(c.L_x, "running_cost");
  requireFinite(c.L_u, "running_cost");
  return c;
}

MayerTerm evalMayer(const ProblemDef &problem, const Eigen::VectorXd &x, double t)
{
  requireSize(x, problem.n, "state");
  MayerTerm p = problem.mayer_term(x, t);
  requireSize(p.phi_x, problem.n, "phi_x");
  requireShape(p.phi_xx, problem.n, problem.n, "phi_xx");
  requireSize(p.phi_tx, problem.n, "phi_tx");
  requireFinite(p.phi, "mayer_term");
  requireFinite(p.phi_t, "mayer_term");
  requireFinite(p.phi_x, "mayer_term");
  requireFinite(p.phi_xx, "mayer_term");
  requireFinite(p.phi_tx, "mayer_term");
  return p;
}

TerminalConstraint evalTerminalEq(const ProblemDef &problem, const Eigen::VectorXd &x, double t)
{
  requireSize(x, problem.n, "terminal state");
  if (problem.q_E == 0)
    return emptyConstraint(problem.n);
  TerminalConstraint c = problem.terminal_eq(x, t);
  checkConstraint(c, problem.q_E, problem.n, "terminal_eq");
  return c;
}

TerminalConstraint evalTerminalIneq(const ProblemDef &problem, const Eigen::VectorXd &x, double t)
{
  requireSize(x, problem.n, "terminal state");
  if (problem.q_I == 0)
    return emptyConstraint(problem.n);
  TerminalConstraint c = problem.terminal_ineq(x, t);
  checkConstraint(c, problem.q_I, problem.n, "terminal_ineq");
  return c;
}

ProblemDef builtinDoubleIntegrator()
{
  ProblemDef p;
  p.name = "double_integrator";
  p.n = 2;
  p.m = 1;
  p.q_E = 2;
  p.q_I = 0;
  p.t0 = 0.0;
  p.x0 = Eigen::Vector2d(1.0, 1.0);
  p.tf_free = false;
  p.tf = 2.0;

  p.dynamics = [](const Eigen::VectorXd &x, const Eigen::VectorXd &u, double) {
    Eigen::VectorXd f(2);
    f << x(1), u(0);
    return f;
  };
  p.dynamics_jacobians = [](const Eigen::VectorXd &, const Eigen::VectorXd &, double) {
    DynamicsJacobians j;
    j.f_x = Eigen::MatrixXd::Zero(2, 2);
    j.f_x(0, 1) = 1.0;
    j.f_u = Eigen::MatrixXd::Zero(2, 1);
    j.f_u(1, 0) = 1.0;
    return j;
  };
  p.running_cost = [](const Eigen::VectorXd &, const Eigen::VectorXd &u, double) {
    RunningCost c;
    c.L = 0.5 * u(0) * u(0);
    c.L_x = Eigen::VectorXd::Zero(2);
    c.L_u = u;
    return c;
  };
  p.mayer_term = [](const Eigen::VectorXd &, double) {
    MayerTerm m;
    m.phi_x = Eigen::VectorXd::Zero(2);
    m.phi_xx = Eigen::MatrixXd::Zero(2, 2);
    m.phi_tx = Eigen::VectorXd::Zero(2);
    return m;
  };
  p.terminal_eq = [](const Eigen::VectorXd &x, double) {
    TerminalConstraint c;
    c.g = x;
    c.g_x = Eigen::MatrixXd::Identity(2, 2);
    c.g_t = Eigen::VectorXd::Zero(2);
    return c;
  };
  return p;
}

ProblemDef builtinBrachistochrone(double y_bound)
{
  if (!(y_bound < 0.0))
    throw ConfigurationError("brachistochrone y_bound must be negative");

  constexpr double g = kBrachistochroneGravity;

  ProblemDef p;
  p.name = "brachistochrone";
  p.n = 3;
  p.m = 1;
  p.q_E = 1;
  p.q_I = 1;
  p.t0 = 0.0;
  p.x0 = Eigen::Vector3d::Zero();
  p.tf_free = true;
  p.tf = 1.0;

  p.dynamics = [](const Eigen::VectorXd &x, const Eigen::VectorXd &u, double) {
    const double v = x(2);
    const double s = std::sin(u(0));
    const double c = std::cos(u(0));
    Eigen::VectorXd f(3);
    f << v * s, -v * c, g * c;
    return f;
  };
  p.dynamics_jacobians = [](const Eigen::VectorXd &x, const Eigen::VectorXd &u, double) {
    const double v = x(2);
    const double s = std::sin(u(0));
    const double c = std::cos(u(0));
    DynamicsJacobians j;
    j.f_x = Eigen::MatrixXd::Zero(3, 3);
    j.f_x(0, 2) = s;
    j.f_x(1, 2) = -c;
    j.f_u.resize(3, 1);
    j.f_u << v * c, v * s, -g * s;
    return j;
  };
  p.running_cost = [](const Eigen::VectorXd &, const Eigen::VectorXd &, double) {
    RunningCost c;
    c.L_x = Eigen::VectorXd::Zero(3);
    c.L_u = Eigen::VectorXd::Zero(1);
    return c;
  };
  // Minimum time in Mayer form.
  p.mayer_term = [](const Eigen::VectorXd &, double t) {
    MayerTerm m;
    m.phi = t;
    m.phi_x = Eigen::VectorXd::Zero(3);
    m.phi_t = 1.0;
    m.phi_xx = Eigen::MatrixXd::Zero(3, 3);
    m.phi_tx = Eigen::VectorXd::Zero(3);
    return m;
  };
  p.terminal_eq = [](const Eigen::VectorXd &x, double) {
    TerminalConstraint c;
    c.g = Eigen::VectorXd::Constant(1, x(0) - 2.0);
    c.g_x = Eigen::MatrixXd::Zero(1, 3);
    c.g_x(0, 0) = 1.0;
    c.g_t = Eigen::VectorXd::Zero(1);
    return c;
  };
  p.terminal_ineq = [y_bound](const Eigen::VectorXd &x, double) {
    TerminalConstraint c;
    c.g = Eigen::VectorXd::Constant(1, x(1) - y_bound);
    c.g_x = Eigen::MatrixXd::Zero(1, 3);
    c.g_x(0, 1) = 1.0;
    c.g_t = Eigen::VectorXd::Zero(1);
    return c;
  };
  return p;
}

ProblemDef builtinProblem(const std::string &name, double y_bound)
{
  if (name == "double_integrator")
    return builtinDoubleIntegrator();
  if (name == "brachistochrone")
    return builtinBrachistochrone(y_bound);
  throw ConfigurationError("unknown problem '" + name + "'");
}

// ---------------------------------------------------------------------------
// Jacobian validation

bool JacobianReport::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const JacobianCheck &c) { return c.passed; });
}

double JacobianReport::maxDiscrepancy() const
{
  double worst = 0.0;
  for (const auto &c : checks)
    worst = std::max(worst, c.max_discrepancy);
  return worst;
}

const JacobianCheck &JacobianReport::check(const std::string &callback) const
{
  for (const auto &c : checks)
    if (c.callback == callback)
      return c;
  throw std::out_of_range("no Jacobian check named " + callback);
}

namespace
{

double stepFor(double z) { return 1e-6 * (1.0 + std::abs(z)); }

double discrepancy(const Eigen::MatrixXd &analytic, const Eigen::MatrixXd &fd)
{
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fd.rows(); ++i)
    for (Eigen::Index j = 0; j < fd.cols(); ++j)
      worst = std::max(worst, std::abs(analytic(i, j) - fd(i, j)) / (1.0 + std::abs(fd(i, j))));
  return worst;
}

// Central difference of a vector-valued function of one scalar argument.
template <typename F>
Eigen::VectorXd centralDiff(F &&eval, double z)
{
  const double h = stepFor(z);
  return (eval(z + h) - eval(z - h)) / (2.0 * h);
}

struct Accumulator
{
  std::vector<JacobianCheck> &checks;
  void add(const std::string &name, double d)
  {
    for (auto &c : checks)
      if (c.callback == name)
      {
        c.max_discrepancy = std::max(c.max_discrepancy, d);
        return;
      }
    checks.push_back({name, d, true});
  }
};

void checkSample(const ProblemDef &p, const JacobianSample &s, Accumulator &acc)
{
  const int n = p.n;
  const int m = p.m;

  // dynamics: f_x, f_u
  {
    const DynamicsJacobians jac = evalJacobians(p, s.x, s.u, s.t);
    Eigen::MatrixXd fx(n, n), fu(n, m);
    for (int k = 0; k < n; ++k)
      fx.col(k) = centralDiff([&](double z) { Eigen::VectorXd x = s.x; x(k) = z; return evalDynamics(p, x, s.u, s.t); }, s.x(k));
    for (int k = 0; k < m; ++k)
      fu.col(k) = centralDiff([&](double z) { Eigen::VectorXd u = s.u; u(k) = z; return evalDynamics(p, s.x, u, s.t); }, s.u(k));
    acc.add("dynamics_jacobians", std::max(discrepancy(jac.f_x, fx), discrepancy(jac.f_u, fu)));
  }

  // running cost: L_x, L_u
  {
    const RunningCost rc = evalRunningCost(p, s.x, s.u, s.t);
    auto L = [&](const Eigen::VectorXd &x, const Eigen::VectorXd &u) {
      return Eigen::VectorXd::Constant(1, evalRunningCost(p, x, u, s.t).L);
    };
    Eigen::VectorXd lx(n), lu(m);
    for (int k = 0; k < n; ++k)
      lx(k) = centralDiff([&](double z) { Eigen::VectorXd x = s.x; x(k) = z; return L(x, s.u); }, s.x(k))(0);
    for (int k = 0; k < m; ++k)
      lu(k) = centralDiff([&](double z) { Eigen::VectorXd u = s.u; u(k) = z; return L(s.x, u); }, s.u(k))(0);
    acc.add("running_cost", std::max(discrepancy(rc.L_x, lx), discrepancy(rc.L_u, lu)));
  }

  // Mayer term: phi_x, phi_t, phi_xx, phi_tx
  {
    const MayerTerm mt = evalMayer(p, s.x, s.t);
    Eigen::VectorXd px(n), ptx(n);
    Eigen::MatrixXd pxx(n, n);
    for (int k = 0; k < n; ++k)
    {
      px(k) = centralDiff([&](double z) { Eigen::VectorXd x = s.x; x(k) = z; return Eigen::VectorXd::Constant(1, evalMayer(p, x, s.t).phi); }, s.x(k))(0);
      pxx.col(k) = centralDiff([&](double z) { Eigen::VectorXd x = s.x; x(k) = z; return evalMayer(p, x, s.t).phi_x; }, s.x(k));
    }
    const double pt = centralDiff([&](double z) { return Eigen::VectorXd::Constant(1, evalMayer(p, s.x, z).phi); }, s.t)(0);
    ptx = centralDiff([&](double z) { return evalMayer(p, s.x, z).phi_x; }, s.t);
    double d = std::max(discrepancy(mt.phi_x, px), discrepancy(mt.phi_xx, pxx));
    d = std::max(d, discrepancy(Eigen::VectorXd::Constant(1, mt.phi_t), Eigen::VectorXd::Constant(1, pt)));
    d = std::max(d, discrepancy(mt.phi_tx, ptx));
    acc.add("mayer_term", d);
  }

  auto constraintCheck = [&](const char *name, int q, auto eval) {
    if (q == 0)
      return;
    const TerminalConstraint c = eval(s.x, s.t);
    Eigen::MatrixXd gx(q, n);
    for (int k = 0; k < n; ++k)
      gx.col(k) = centralDiff([&](double z) { Eigen::VectorXd x = s.x; x(k) = z; return eval(x, s.t).g; }, s.x(k));
    const Eigen::VectorXd gt = centralDiff([&](double z) { return eval(s.x, z).g; }, s.t);
    acc.add(name, std::max(discrepancy(c.g_x, gx), discrepancy(c.g_t, gt)));
  };
  constraintCheck("terminal_eq", p.q_E, [&](const Eigen::VectorXd &x, double t) { return evalTerminalEq(p, x, t); });
  constraintCheck("terminal_ineq", p.q_I, [&](const Eigen::VectorXd &x, double t) { return evalTerminalIneq(p, x, t); });
}

} // namespace

JacobianReport validateJacobians(const ProblemDef &problem, const std::vector<JacobianSample> &samples,
                                 double threshold)
{
  if (samples.empty())
    throw ConfigurationError("validateJacobians needs at least one sample");

  JacobianReport report;
  report.threshold = threshold;
  Accumulator acc{report.checks};
  for (std::size_t i = 0; i < samples.size(); ++i)
  {
    try
    {
      checkSample(problem, samples[i], acc);
    }
    catch (const std::exception &e)
    {
      throw EvaluationError("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  for (auto &c : report.checks)
    c.passed = c.max_discrepancy <= threshold;
  return report;
}

} // namespace vem
