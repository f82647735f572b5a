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

#include "vem/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "vem/error.hpp"

namespace vem
{

GainSet GainSet::uniform(const ProblemDef &problem, double k, double k_tf)
{
  GainSet g;
  g.K = k * Eigen::MatrixXd::Identity(problem.m, problem.m);
  g.K_x0 = k * Eigen::MatrixXd::Identity(problem.n, problem.n);
  g.K_f = k * Eigen::MatrixXd::Identity(problem.n, problem.n);
  g.K_gE = k * Eigen::MatrixXd::Identity(problem.q_E, problem.q_E);
  g.k_gI = Eigen::VectorXd::Constant(problem.q_I, k);
  g.k_tf = k_tf;
  return g;
}

std::pair<double, double> symmetricEigenRange(const Eigen::MatrixXd &a)
{
  if (a.size() == 0)
    return {std::numeric_limits<double>::infinity(), 0.0};
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

namespace
{

void checkDefinite(const Eigen::MatrixXd &a, int dim, const char *name)
{
  if (a.rows() != dim || a.cols() != dim)
  {
    std::ostringstream os;
    os << name << " must be " << dim << "x" << dim;
    throw ConfigurationError(os.str());
  }
  if (dim == 0)
    return;
  if (!a.allFinite() || !(symmetricEigenRange(a).first > 0.0))
    throw ConfigurationError(std::string(name) + " not positive-definite");
}

} // namespace

void checkGains(const ProblemDef &problem, const GainSet &gains)
{
  checkDefinite(gains.K, problem.m, "K");
  checkDefinite(gains.K_x0, problem.n, "K_x0");
  checkDefinite(gains.K_f, problem.n, "K_f");
  checkDefinite(gains.K_gE, problem.q_E, "K_gE");
  if (gains.k_gI.size() != problem.q_I)
    throw ConfigurationError("k_gI must have one entry per inequality constraint");
  for (Eigen::Index i = 0; i < gains.k_gI.size(); ++i)
    if (!(gains.k_gI(i) > 0.0) || !std::isfinite(gains.k_gI(i)))
      throw ConfigurationError("k_gI not positive");
  if (!(gains.k_tf >= 0.0) || !std::isfinite(gains.k_tf))
    throw ConfigurationError("k_tf must be nonnegative");
}

IndexSets computeIndexSets(const Eigen::VectorXd &g_I)
{
  IndexSets sets;
  for (Eigen::Index i = 0; i < g_I.size(); ++i)
    if (g_I(i) >= 0.0)
      sets.violated.push_back(static_cast<int>(i));
  return sets;
}

ReducedSystem reduceSystem(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                           const GainSet &gains, const SensitivityBundle &bundle)
{
  const int N = grid.N;
  const int n = problem.n;

  ReducedSystem sys;
  sys.q_E = problem.q_E;
  sys.q_I = problem.q_I;
  const int q = sys.q_E + sys.q_I;
  sys.G.resize(q, n);
  sys.g.resize(q);
  sys.c.resize(q);
  const Eigen::VectorXd xdot_f = bundle.xdot.row(N - 1).transpose();
  if (sys.q_E > 0)
  {
    sys.G.topRows(sys.q_E) = bundle.g_E.g_x;
    sys.g.head(sys.q_E) = bundle.g_E.g;
    sys.c.head(sys.q_E) = bundle.g_E.g_x * xdot_f + bundle.g_E.g_t;
  }
  if (sys.q_I > 0)
  {
    sys.G.bottomRows(sys.q_I) = bundle.g_I.g_x;
    sys.g.tail(sys.q_I) = bundle.g_I.g;
    sys.c.tail(sys.q_I) = bundle.g_I.g_x * xdot_f + bundle.g_I.g_t;
  }

  // Integrands in the t0 frame: Phi(t_f, t) = Phi(t_f, t0) Phi(t0, t).
  Eigen::MatrixXd gram(N, n * n);
  Eigen::MatrixXd drift(N, n);
  Eigen::MatrixXd defect(N, n);
  for (int i = 0; i < N; ++i)
  {
    const Eigen::MatrixXd Y = ts.toStart(i) * bundle.f_u[i]; // n x m
    const Eigen::MatrixXd YK = Y * gains.K;
    const Eigen::MatrixXd gi = YK * Y.transpose();
    gram.row(i) = Eigen::Map<const Eigen::RowVectorXd>(gi.data(), n * n);
    drift.row(i) = (YK * bundle.p_u_bar.row(i).transpose()).transpose();
    defect.row(i) = (ts.toStart(i) * (gains.K_f * bundle.e_f.row(i).transpose())).transpose();
  }

  const Eigen::MatrixXd &P = ts.fromStart(N - 1);
  const Eigen::VectorXd gram_int = trapezoid(gram, grid);
  const Eigen::Map<const Eigen::MatrixXd> gram_mat(gram_int.data(), n, n);
  sys.W = P * gram_mat * P.transpose();
  sys.z = P * trapezoid(drift, grid);
  sys.a0 = -P * (gains.K_x0 * bundle.e_x0 + trapezoid(defect, grid));

  sys.p_tf = bundle.p_tf;
  sys.k_tf = problem.tf_free ? gains.k_tf : 0.0;
  sys.K_gE = gains.K_gE;
  sys.k_gI = gains.k_gI;
  return sys;
}

namespace
{

std::vector<int> stackedRows(const ReducedSystem &sys, const std::vector<int> &active)
{
  std::vector<int> rows;
  rows.reserve(sys.q_E + active.size());
  for (int i = 0; i < sys.q_E; ++i)
    rows.push_back(i);
  for (int i : active)
    rows.push_back(sys.q_E + i);
  return rows;
}

} // namespace

LinearSystem assembleSystem(const ReducedSystem &sys, const std::vector<int> &active)
{
  const std::vector<int> rows = stackedRows(sys, active);
  const int k = static_cast<int>(rows.size());
  const Eigen::Index n = sys.W.rows();

  Eigen::MatrixXd Gs(k, n);
  Eigen::VectorXd cs(k), gs(k);
  Eigen::MatrixXd decay = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
  {
    Gs.row(a) = sys.G.row(rows[a]);
    cs(a) = sys.c(rows[a]);
    gs(a) = sys.g(rows[a]);
  }
  if (sys.q_E > 0)
    decay.topLeftCorner(sys.q_E, sys.q_E) = sys.K_gE;
  for (std::size_t a = 0; a < active.size(); ++a)
    decay(sys.q_E + a, sys.q_E + a) = sys.k_gI(active[a]);

  LinearSystem ls;
  ls.M = Gs * sys.W * Gs.transpose() + sys.k_tf * cs * cs.transpose();
  ls.r = Gs * (sys.z - sys.a0) + sys.k_tf * sys.p_tf * cs - decay * gs;
  return ls;
}

LinearSystem assembleSystem(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                            const GainSet &gains, const SensitivityBundle &bundle, const IndexSets &sets)
{
  return assembleSystem(reduceSystem(problem, grid, ts, gains, bundle), sets.active);
}

Eigen::VectorXd constraintRates(const ReducedSystem &sys, const Eigen::VectorXd &pi_E, const Eigen::VectorXd &pi_I)
{
  Eigen::VectorXd pi(sys.q_E + sys.q_I);
  pi << pi_E, pi_I;
  const Eigen::VectorXd dxf = sys.a0 - sys.z - sys.W * (sys.G.transpose() * pi);
  const double dtf = -sys.k_tf * (sys.p_tf + sys.c.dot(pi));
  return sys.G * dxf + sys.c * dtf;
}

namespace
{

struct Candidate
{
  std::vector<int> active;
  LinearSystem system;
  Eigen::VectorXd pi_E;
  Eigen::VectorXd pi_I;
};

// Solves M pi = -r for one active set; nullopt when M is too ill-conditioned.
std::optional<Candidate> solveFor(const ReducedSystem &sys, const std::vector<int> &active)
{
  Candidate c;
  c.active = active;
  c.system = assembleSystem(sys, active);
  c.pi_E = Eigen::VectorXd::Zero(sys.q_E);
  c.pi_I = Eigen::VectorXd::Zero(sys.q_I);
  const Eigen::Index k = c.system.M.rows();
  if (k == 0)
    return c;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(c.system.M);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !(1.0 / rc <= kMultiplierConditionLimit))
    return std::nullopt;
  const Eigen::VectorXd pi = lu.solve(-c.system.r);
  if (!pi.allFinite())
    return std::nullopt;
  c.pi_E = pi.head(sys.q_E);
  for (std::size_t a = 0; a < active.size(); ++a)
    c.pi_I(active[a]) = pi(sys.q_E + a);
  return c;
}

double multiplierTolerance(const Candidate &c)
{
  double scale = 0.0;
  if (c.pi_E.size() > 0)
    scale = std::max(scale, c.pi_E.cwiseAbs().maxCoeff());
  if (c.pi_I.size() > 0)
    scale = std::max(scale, c.pi_I.cwiseAbs().maxCoeff());
  return 1e-12 * (1.0 + scale);
}

// Indices of I \ I_p whose decay inequality dg_i + k_i g_i <= 0 fails.
std::vector<int> decayViolators(const ReducedSystem &sys, const Candidate &c, const std::vector<int> &violated)
{
  const Eigen::VectorXd rates = constraintRates(sys, c.pi_E, c.pi_I);
  std::vector<int> out;
  for (int i : violated)
  {
    if (std::find(c.active.begin(), c.active.end(), i) != c.active.end())
      continue;
    const double dg = rates(sys.q_E + i);
    const double kg = sys.k_gI(i) * sys.g(sys.q_E + i);
    const double tol = 1e-10 * (std::abs(dg) + std::abs(kg)) + std::numeric_limits<double>::min();
    if (dg + kg > tol)
      out.push_back(i);
  }
  return out;
}

bool multipliersNonnegative(const Candidate &c)
{
  const double tol = multiplierTolerance(c);
  for (int i : c.active)
    if (c.pi_I(i) < -tol)
      return false;
  return true;
}

MultiplierResult toResult(Candidate c, const IndexSets &base, int iterations, bool enumerated)
{
  MultiplierResult res;
  // Round-off negatives inside the tolerance are reported as zero.
  for (int i : c.active)
    c.pi_I(i) = std::max(c.pi_I(i), 0.0);
  res.pi_E = std::move(c.pi_E);
  res.pi_I = std::move(c.pi_I);
  res.sets.violated = base.violated;
  res.sets.active = std::move(c.active);
  res.system = std::move(c.system);
  res.solve_iterations = iterations;
  res.used_enumeration = enumerated;
  return res;
}

std::string describe(const std::vector<int> &active)
{
  std::ostringstream os;
  os << "{";
  for (std::size_t a = 0; a < active.size(); ++a)
    os << (a ? "," : "") << active[a];
  os << "}";
  return os.str();
}

} // namespace

MultiplierResult enumerateActiveSet(const ReducedSystem &sys)
{
  const IndexSets base = computeIndexSets(sys.g.tail(sys.q_I));
  const int nv = static_cast<int>(base.violated.size());
  if (nv > 20)
    throw DegenerateActiveSetError("too many violated inequalities to enumerate");

  // Smaller sets first so degenerate ties resolve to the leanest active set.
  std::vector<unsigned> masks(1u << nv);
  for (unsigned mask = 0; mask < masks.size(); ++mask)
    masks[mask] = mask;
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned a, unsigned b) { return __builtin_popcount(a) < __builtin_popcount(b); });

  int iterations = 0;
  for (unsigned mask : masks)
  {
    std::vector<int> active;
    for (int b = 0; b < nv; ++b)
      if (mask & (1u << b))
        active.push_back(base.violated[b]);
    ++iterations;
    auto c = solveFor(sys, active);
    if (!c || !multipliersNonnegative(*c))
      continue;
    if (!decayViolators(sys, *c, base.violated).empty())
      continue;
    return toResult(std::move(*c), base, iterations, true);
  }
  throw DegenerateActiveSetError("no subset of " + describe(base.violated) +
                                 " gives nonnegative multipliers with decaying inactive constraints");
}

MultiplierResult solveActiveSet(const ReducedSystem &sys)
{
  const IndexSets base = computeIndexSets(sys.g.tail(sys.q_I));
  std::vector<int> active = base.violated;
  std::set<std::vector<int>> visited;
  int iterations = 0;

  while (true)
  {
    if (!visited.insert(active).second)
    {
      MultiplierResult res = enumerateActiveSet(sys);
      res.solve_iterations += iterations;
      return res;
    }

    std::optional<Candidate> c;
    while (true)
    {
      ++iterations;
      c = solveFor(sys, active);
      if (!c)
        throw ControllabilityError("multiplier matrix singular for active set " + describe(active));
      const double tol = multiplierTolerance(*c);
      int worst = -1;
      for (int i : active)
        if (c->pi_I(i) < -tol && (worst < 0 || c->pi_I(i) < c->pi_I(worst)))
          worst = i;
      if (worst < 0)
        break;
      active.erase(std::find(active.begin(), active.end(), worst));
    }

    const std::vector<int> violators = decayViolators(sys, *c, base.violated);
    if (violators.empty())
      return toResult(std::move(*c), base, iterations, false);

    active.insert(active.end(), violators.begin(), violators.end());
    std::sort(active.begin(), active.end());
  }
}

MultiplierResult solveActiveSet(const ProblemDef &problem, const Grid &grid, const TransitionSet &ts,
                                const GainSet &gains, const SensitivityBundle &bundle)
{
  return solveActiveSet(reduceSystem(problem, grid, ts, gains, bundle));
}

} // namespace vem
