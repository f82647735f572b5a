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

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "vem/config.hpp"
#include "vem/evolution.hpp"
#include "vem/integrator.hpp"
#include "vem/mesh.hpp"
#include "vem/multipliers.hpp"
#include "vem/problem.hpp"
#include "vem/state.hpp"

namespace vem::test
{

// Analytic optimum of the double integrator example.
inline double ex1X1(double t) { return 0.5 * t * t * t - 1.75 * t * t + t + 1.0; }
inline double ex1X2(double t) { return 1.5 * t * t - 3.5 * t + 1.0; }
inline double ex1U(double t) { return 3.0 * t - 3.5; }

inline SolutionState ex1Optimum(int N)
{
  const Grid grid = makeGrid(N, 0.0, 2.0);
  SolutionState s;
  s.tf = 2.0;
  s.X.resize(N, 2);
  s.U.resize(N, 1);
  for (int i = 0; i < N; ++i)
  {
    const double t = grid.t(i);
    s.X(i, 0) = ex1X1(t);
    s.X(i, 1) = ex1X2(t);
    s.U(i, 0) = ex1U(t);
  }
  return s;
}

inline SolutionState ex1Guess(const ProblemDef &p, int N)
{
  return constantGuess(p, N, 2.0, Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
}

inline GainSet ex1Gains(const ProblemDef &p) { return GainSet::uniform(p, 0.1, 0.0); }

inline SolutionState ex2Guess(const ProblemDef &p, int N)
{
  return constantGuess(p, N, 1.0, Eigen::Vector3d(1.0, 1.0, 1.0), Eigen::VectorXd::Zero(1),
                       Eigen::VectorXd::Ones(1));
}

inline GainSet ex2Gains(const ProblemDef &p) { return GainSet::uniform(p, 0.1, 0.05); }

inline RunSpec exampleSpec(const std::string &problem, double y_bound)
{
  RunSpec spec;
  spec.problem_name = problem;
  spec.y_bound = y_bound;
  spec.problem = builtinProblem(problem, y_bound);
  if (problem == "double_integrator")
  {
    spec.nodes = 41;
    spec.gains = ex1Gains(spec.problem);
    spec.guess.x = Eigen::Vector2d(0.5, 0.5);
    spec.guess.u = Eigen::VectorXd::Zero(1);
  }
  else
  {
    spec.nodes = 101;
    spec.gains = ex2Gains(spec.problem);
    spec.guess.x = Eigen::Vector3d(1.0, 1.0, 1.0);
    spec.guess.u = Eigen::VectorXd::Zero(1);
    spec.guess.u_slope = Eigen::VectorXd::Ones(1);
    spec.guess.tf = 1.0;
  }
  return spec;
}

/// Smooth trajectory given analytically: values and time derivatives.
struct Trajectory
{
  std::function<Eigen::VectorXd(double)> x, xdot, u, udot;
  double tf = 1.0;
};

inline SolutionState sample(const ProblemDef &p, const Trajectory &tr, int N)
{
  const Grid grid = makeGrid(N, p.t0, tr.tf);
  SolutionState s;
  s.tf = tr.tf;
  s.X.resize(N, p.n);
  s.U.resize(N, p.m);
  for (int i = 0; i < N; ++i)
  {
    s.X.row(i) = tr.x(grid.t(i)).transpose();
    s.U.row(i) = tr.u(grid.t(i)).transpose();
  }
  return s;
}

/// Quadratic-in-t trajectory; central and one-sided differences are exact on it.
inline Trajectory quadraticTrajectory(const Eigen::MatrixXd &cx, const Eigen::MatrixXd &cu, double tf)
{
  // cx, cu: rows = components, columns = coefficients of 1, t, t^2.
  Trajectory tr;
  tr.tf = tf;
  tr.x = [cx](double t) { return Eigen::VectorXd(cx.col(0) + cx.col(1) * t + cx.col(2) * t * t); };
  tr.xdot = [cx](double t) { return Eigen::VectorXd(cx.col(1) + 2.0 * cx.col(2) * t); };
  tr.u = [cu](double t) { return Eigen::VectorXd(cu.col(0) + cu.col(1) * t + cu.col(2) * t * t); };
  tr.udot = [cu](double t) { return Eigen::VectorXd(cu.col(1) + 2.0 * cu.col(2) * t); };
  return tr;
}

/// Random smooth trajectory in the region the evolution visits.
inline Trajectory randomTrajectory(const ProblemDef &p, std::mt19937 &rng)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  if (p.name == "double_integrator")
  {
    Eigen::MatrixXd cx(2, 3), cu(1, 3);
    cx << 1.0 + 0.3 * d(rng), 0.5 * d(rng), 0.5 * d(rng), 1.0 + 0.3 * d(rng), 0.5 * d(rng), 0.5 * d(rng);
    cu << 2.0 * d(rng), 2.0 * d(rng), 0.5 * d(rng);
    return quadraticTrajectory(cx, cu, 2.0);
  }
  const double tf = 0.9 + 0.2 * d(rng);
  Eigen::MatrixXd cx(3, 3), cu(1, 3);
  cx << 0.1 * d(rng), 2.0 + 0.3 * d(rng), 0.3 * d(rng),                 // x
      0.1 * d(rng), -1.0 + 0.3 * d(rng), -1.0 + 0.3 * d(rng),          // y
      1.0 + 0.2 * d(rng), 4.0 + 1.0 * d(rng), 0.5 * d(rng);            // V
  cu << 0.4 + 0.2 * d(rng), 1.0 + 0.3 * d(rng), 0.2 * d(rng);
  return quadraticTrajectory(cx, cu, tf);
}

/**
 * Reference right-hand side on a refined grid. Independent of the library
 * kernels: analytic time derivatives instead of finite differences,
 * transition matrices from RK4 with sub-steps on the analytic trajectory,
 * every Phi(t_i, t_j) formed per pair, and the multiplier system built from
 * the printed integrals with exhaustive active-set search.
 */
class ReferenceRhs
{
public:
  ReferenceRhs(const ProblemDef &p, const Trajectory &tr, const GainSet &gains, int N, bool convection = true)
      : p_(p), gains_(gains), N_(N), tf_(tr.tf)
  {
    const int n = p.n;
    k_tf_ = p.tf_free ? gains.k_tf : 0.0;
    h_ = (tf_ - p.t0) / (N - 1);
    t_.resize(N);
    for (int i = 0; i < N; ++i)
      t_[i] = p.t0 + h_ * i;

    X_.resize(N);
    Xd_.resize(N);
    U_.resize(N);
    Ud_.resize(N);
    fu_.resize(N);
    ef_.resize(N);
    Lu_.resize(N);
    q_.resize(N);
    for (int i = 0; i < N; ++i)
    {
      X_[i] = tr.x(t_[i]);
      Xd_[i] = tr.xdot(t_[i]);
      U_[i] = tr.u(t_[i]);
      Ud_[i] = tr.udot(t_[i]);
      const DynamicsJacobians J = p.dynamics_jacobians(X_[i], U_[i], t_[i]);
      fu_[i] = J.f_u;
      ef_[i] = Xd_[i] - p.dynamics(X_[i], U_[i], t_[i]);
      const RunningCost rc = p.running_cost(X_[i], U_[i], t_[i]);
      Lu_[i] = rc.L_u;
      const MayerTerm mt = p.mayer_term(X_[i], t_[i]);
      q_[i] = rc.L_x + mt.phi_tx + mt.phi_xx.transpose() * Xd_[i] + J.f_x.transpose() * mt.phi_x;
      if (i == N - 1)
        p_tf_ = rc.L + mt.phi_t + mt.phi_x.dot(Xd_[i]);
    }
    phi_x_ = [this](int i) { return p_.mayer_term(X_[i], t_[i]).phi_x; };

    // Phi(t_i, t0) with 8 RK4 sub-steps per interval on the exact trajectory.
    Phi_.assign(N, Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    auto A = [&](double t) { return p.dynamics_jacobians(tr.x(t), tr.u(t), t).f_x; };
    const int sub = 8;
    for (int i = 0; i + 1 < N; ++i)
    {
      const double hs = h_ / sub;
      for (int k = 0; k < sub; ++k)
      {
        const double s = t_[i] + k * hs;
        const Eigen::MatrixXd k1 = A(s) * P;
        const Eigen::MatrixXd k2 = A(s + hs / 2) * (P + hs / 2 * k1);
        const Eigen::MatrixXd k3 = A(s + hs / 2) * (P + hs / 2 * k2);
        const Eigen::MatrixXd k4 = A(s + hs) * (P + hs * k3);
        P += hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      }
      Phi_[i + 1] = P;
    }
    PhiInv_.resize(N);
    for (int i = 0; i < N; ++i)
      PhiInv_[i] = Phi_[i].inverse();

    e_x0_ = X_[0] - p.x0;

    // w(t_i) = int_{t_i}^{t_f} Phi(s, t_i)^T q(s) ds, p_u_bar.
    pu_.resize(N);
    for (int i = 0; i < N; ++i)
    {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      for (int j = i; j < N && i < N - 1; ++j)
        w += trapWeight(j, i, N - 1) * (Phi(j, i).transpose() * q_[j]);
      pu_[i] = Lu_[i] + fu_[i].transpose() * (phi_x_(i) + w);
    }

    const Eigen::VectorXd xf = X_[N - 1];
    if (p.q_E)
      gE_ = p.terminal_eq(xf, tf_);
    if (p.q_I)
      gI_ = p.terminal_ineq(xf, tf_);
    solve(convection);
  }

  /// Phi(t_i, t_j)
  Eigen::MatrixXd Phi(int i, int j) const { return Phi_[i] * PhiInv_[j]; }

  Eigen::VectorXd packed(int stride) const
  {
    // Library layout on the sub-grid of every stride-th node.
    const int Nc = (N_ - 1) / stride + 1;
    Eigen::VectorXd y(Nc * (p_.n + p_.m) + (p_.tf_free ? 1 : 0));
    int k = 0;
    for (int i = 0; i < N_; i += stride)
      for (int j = 0; j < p_.n; ++j)
        y(k++) = dX[i](j);
    for (int i = 0; i < N_; i += stride)
      for (int j = 0; j < p_.m; ++j)
        y(k++) = dU[i](j);
    if (p_.tf_free)
      y(k) = dtf;
    return y;
  }

  std::vector<Eigen::VectorXd> dX, dU;
  double dtf = 0.0;
  Eigen::VectorXd pi_E, pi_I;

private:
  double trapWeight(int j, int lo, int hi) const { return (j == lo || j == hi) ? h_ / 2 : h_; }

  struct Rates
  {
    std::vector<Eigen::VectorXd> dX, dU;
    double dtf;
  };

  Rates rates(const Eigen::VectorXd &piE, const Eigen::VectorXd &piI) const
  {
    const int N = N_, n = p_.n;
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
    double cterm = 0.0;
    if (p_.q_E)
    {
      nu += gE_.g_x.transpose() * piE;
      cterm += piE.dot(gE_.g_x * Xd_[N - 1] + gE_.g_t);
    }
    if (p_.q_I)
    {
      nu += gI_.g_x.transpose() * piI;
      cterm += piI.dot(gI_.g_x * Xd_[N - 1] + gI_.g_t);
    }
    Rates r;
    r.dU.resize(N);
    for (int i = 0; i < N; ++i)
      r.dU[i] = -gains_.K * (pu_[i] + fu_[i].transpose() * Phi(N - 1, i).transpose() * nu);
    r.dtf = -k_tf_ * (p_tf_ + cterm);
    r.dX.resize(N);
    for (int i = 0; i < N; ++i)
    {
      Eigen::VectorXd v = -Phi(i, 0) * gains_.K_x0 * e_x0_;
      for (int j = 0; j <= i && i > 0; ++j)
        v += trapWeight(j, 0, i) * (Phi(i, j) * (fu_[j] * r.dU[j] - gains_.K_f * ef_[j]));
      r.dX[i] = v;
    }
    return r;
  }

  void solve(bool convection)
  {
    const int N = N_, n = p_.n;
    const int q = p_.q_E + p_.q_I;
    Eigen::MatrixXd G(q, n);
    Eigen::VectorXd c(q), g(q);
    Eigen::MatrixXd Kg = Eigen::MatrixXd::Zero(q, q);
    if (p_.q_E)
    {
      G.topRows(p_.q_E) = gE_.g_x;
      c.head(p_.q_E) = gE_.g_x * Xd_[N - 1] + gE_.g_t;
      g.head(p_.q_E) = gE_.g;
      Kg.topLeftCorner(p_.q_E, p_.q_E) = gains_.K_gE;
    }
    if (p_.q_I)
    {
      G.bottomRows(p_.q_I) = gI_.g_x;
      c.tail(p_.q_I) = gI_.g_x * Xd_[N - 1] + gI_.g_t;
      g.tail(p_.q_I) = gI_.g;
      for (int i = 0; i < p_.q_I; ++i)
        Kg(p_.q_E + i, p_.q_E + i) = gains_.k_gI(i);
    }

    // Printed integrals over [t0, t_f] with the full stacked G.
    Eigen::MatrixXd Mfull = Eigen::MatrixXd::Zero(q, q);
    Eigen::VectorXd rfull = Eigen::VectorXd::Zero(q);
    for (int j = 0; j < N; ++j)
    {
      const double wt = trapWeight(j, 0, N - 1);
      const Eigen::MatrixXd Psi = G * Phi(N - 1, j) * fu_[j];
      Mfull += wt * Psi * gains_.K * Psi.transpose();
      rfull += wt * (Psi * gains_.K * pu_[j]);
      rfull += wt * (G * Phi(N - 1, j) * gains_.K_f * ef_[j]);
    }
    Mfull += k_tf_ * c * c.transpose();
    rfull += k_tf_ * p_tf_ * c - Kg * g + G * Phi(N - 1, 0) * gains_.K_x0 * e_x0_;

    std::vector<int> violated;
    for (int i = 0; i < p_.q_I; ++i)
      if (gI_.g(i) >= 0.0)
        violated.push_back(i);

    bool found = false;
    const int nv = static_cast<int>(violated.size());
    for (int size = 0; size <= nv && !found; ++size)
      for (unsigned mask = 0; mask < (1u << nv) && !found; ++mask)
      {
        if (__builtin_popcount(mask) != size)
          continue;
        std::vector<int> rows;
        for (int i = 0; i < p_.q_E; ++i)
          rows.push_back(i);
        std::vector<int> act;
        for (int b = 0; b < nv; ++b)
          if (mask & (1u << b))
          {
            act.push_back(violated[b]);
            rows.push_back(p_.q_E + violated[b]);
          }
        const int k = static_cast<int>(rows.size());
        Eigen::MatrixXd M(k, k);
        Eigen::VectorXd r(k);
        for (int a = 0; a < k; ++a)
        {
          r(a) = rfull(rows[a]);
          for (int b = 0; b < k; ++b)
            M(a, b) = Mfull(rows[a], rows[b]);
        }
        Eigen::VectorXd pi = k ? Eigen::VectorXd(M.fullPivLu().solve(-r)) : Eigen::VectorXd();
        Eigen::VectorXd piE = Eigen::VectorXd::Zero(p_.q_E), piI = Eigen::VectorXd::Zero(p_.q_I);
        for (int i = 0; i < p_.q_E; ++i)
          piE(i) = pi(i);
        bool ok = true;
        for (std::size_t a = 0; a < act.size(); ++a)
        {
          piI(act[a]) = pi(p_.q_E + a);
          ok = ok && piI(act[a]) >= -1e-12;
        }
        if (!ok)
          continue;
        const Rates rr = rates(piE, piI);
        for (int i : violated)
        {
          if (std::find(act.begin(), act.end(), i) != act.end())
            continue;
          const double dg = gI_.g_x.row(i).dot(rr.dX[N - 1]) + c(p_.q_E + i) * rr.dtf;
          if (dg + gains_.k_gI(i) * gI_.g(i) > 1e-9)
            ok = false;
        }
        if (!ok)
          continue;
        found = true;
        pi_E = piE;
        pi_I = piI;
        dX = rr.dX;
        dU = rr.dU;
        dtf = rr.dtf;
      }
    if (!found)
      throw std::runtime_error("reference: no admissible active set");

    if (convection && p_.tf_free)
      for (int i = 0; i < N; ++i)
      {
        const double s = (t_[i] - p_.t0) / (tf_ - p_.t0);
        dX[i] += s * dtf * Xd_[i];
        dU[i] += s * dtf * Ud_[i];
      }
  }

  ProblemDef p_;
  GainSet gains_;
  int N_;
  double tf_, h_, k_tf_ = 0.0, p_tf_ = 0.0;
  std::vector<double> t_;
  std::vector<Eigen::VectorXd> X_, Xd_, U_, Ud_, ef_, Lu_, q_, pu_;
  std::vector<Eigen::MatrixXd> fu_, Phi_, PhiInv_;
  std::function<Eigen::VectorXd(int)> phi_x_;
  Eigen::VectorXd e_x0_;
  TerminalConstraint gE_, gI_;
};

/// Uniform sample points for derivative checks.
inline std::vector<JacobianSample> randomSamples(const ProblemDef &p, int count, unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<JacobianSample> out;
  for (int k = 0; k < count; ++k)
  {
    JacobianSample s;
    s.x = Eigen::VectorXd::NullaryExpr(p.n, [&] { return d(rng); });
    s.u = Eigen::VectorXd::NullaryExpr(p.m, [&] { return d(rng); });
    s.t = 1.0 + 0.5 * d(rng);
    out.push_back(s);
  }
  return out;
}

// Random instance of the reduced multiplier problem: W a Gram matrix, all
// other quantities arbitrary.
inline ReducedSystem randomSystem(std::mt19937 &rng, int n, int q_E, int q_I)
{
  std::normal_distribution<double> d;
  std::uniform_real_distribution<double> pos(0.05, 1.0);
  ReducedSystem sys;
  sys.q_E = q_E;
  sys.q_I = q_I;
  const int q = q_E + q_I;
  const Eigen::MatrixXd B = Eigen::MatrixXd::NullaryExpr(n, n + 2, [&] { return d(rng); });
  sys.W = B * B.transpose() / (n + 2);
  sys.G = Eigen::MatrixXd::NullaryExpr(q, n, [&] { return d(rng); });
  sys.c = Eigen::VectorXd::NullaryExpr(q, [&] { return d(rng); });
  sys.g = Eigen::VectorXd::NullaryExpr(q, [&] { return d(rng); });
  sys.z = Eigen::VectorXd::NullaryExpr(n, [&] { return d(rng); });
  sys.a0 = Eigen::VectorXd::NullaryExpr(n, [&] { return d(rng); });
  sys.p_tf = d(rng);
  sys.k_tf = (rng() % 2) ? pos(rng) : 0.0;
  sys.K_gE = Eigen::VectorXd::NullaryExpr(q_E, [&] { return pos(rng); }).asDiagonal();
  sys.k_gI = Eigen::VectorXd::NullaryExpr(q_I, [&] { return pos(rng); });
  return sys;
}

/// Relative packed-norm distance between the library rhs on N nodes and the
/// reference on 10(N-1)+1 nodes, compared at the shared nodes.
inline double refinedRhsError(const ProblemDef &p, const Trajectory &tr, const GainSet &gains, int N)
{
  const SolutionState s = sample(p, tr, N);
  const Eigen::VectorXd lib = pack(p, evolutionRhs(p, s, gains));
  const ReferenceRhs ref(p, tr, gains, 10 * (N - 1) + 1);
  const Eigen::VectorXd want = ref.packed(10);
  return (lib - want).norm() / want.norm();
}

} // namespace vem::test
