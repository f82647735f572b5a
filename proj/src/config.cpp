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

#include "vem/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vem/csv.hpp"
#include "vem/error.hpp"
#include "vem/mesh.hpp"

namespace vem
{

namespace
{

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool isIdentifier(const std::string &s)
{
  if (s.empty())
    return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

// Drops a trailing comment that is not inside a quoted string.
std::string stripComment(const std::string &line)
{
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i)
  {
    if (line[i] == '"')
      quoted = !quoted;
    else if (line[i] == '#' && !quoted)
      return line.substr(0, i);
  }
  return line;
}

bool parseNumber(const std::string &s, double &out)
{
  if (s.empty())
    return false;
  char *end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return *end == '\0' && std::isfinite(out);
}

ConfigValue parseValue(const std::string &raw, const std::string &where)
{
  const std::string s = trim(raw);
  if (s.empty())
    throw ConfigurationError(where + ": missing value");
  if (s.front() == '"')
  {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigurationError(where + ": unterminated string");
    const std::string body = s.substr(1, s.size() - 2);
    if (body.find('"') != std::string::npos)
      throw ConfigurationError(where + ": embedded quotes are not supported");
    return body;
  }
  if (s == "true")
    return true;
  if (s == "false")
    return false;
  if (s.front() == '[')
  {
    if (s.back() != ']')
      throw ConfigurationError(where + ": unterminated array");
    std::vector<double> values;
    const std::string body = trim(s.substr(1, s.size() - 2));
    if (body.empty())
      return values;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ','))
    {
      double v = 0.0;
      if (!parseNumber(trim(item), v))
        throw ConfigurationError(where + ": array entry '" + trim(item) + "' is not a finite number");
      values.push_back(v);
    }
    return values;
  }
  double v = 0.0;
  if (!parseNumber(s, v))
    throw ConfigurationError(where + ": cannot parse value '" + s + "'");
  return v;
}

class Reader
{
public:
  explicit Reader(std::map<std::string, ConfigValue> values) : values_(std::move(values)) {}

  bool has(const std::string &key) const { return values_.count(key) != 0; }

  double number(const std::string &key)
  {
    const ConfigValue &v = take(key);
    if (const double *d = std::get_if<double>(&v))
      return *d;
    throw ConfigurationError(key + ": expected a number");
  }

  int integer(const std::string &key)
  {
    const double d = number(key);
    if (d != std::floor(d) || std::abs(d) > 1e9)
      throw ConfigurationError(key + ": expected an integer");
    return static_cast<int>(d);
  }

  bool boolean(const std::string &key)
  {
    const ConfigValue &v = take(key);
    if (const bool *b = std::get_if<bool>(&v))
      return *b;
    if (const std::string *s = std::get_if<std::string>(&v))
    {
      if (*s == "on")
        return true;
      if (*s == "off")
        return false;
    }
    throw ConfigurationError(key + ": expected true/false or \"on\"/\"off\"");
  }

  std::string string(const std::string &key)
  {
    const ConfigValue &v = take(key);
    if (const std::string *s = std::get_if<std::string>(&v))
      return *s;
    throw ConfigurationError(key + ": expected a quoted string");
  }

  // A scalar is broadcast to the requested length; an array must match it.
  Eigen::VectorXd vector(const std::string &key, int size)
  {
    const ConfigValue &v = take(key);
    if (const double *d = std::get_if<double>(&v))
      return Eigen::VectorXd::Constant(size, *d);
    if (const auto *a = std::get_if<std::vector<double>>(&v))
    {
      if (static_cast<int>(a->size()) != size)
        throw ConfigurationError(key + ": expected " + std::to_string(size) + " entries, found " +
                                 std::to_string(a->size()));
      return Eigen::Map<const Eigen::VectorXd>(a->data(), size);
    }
    throw ConfigurationError(key + ": expected a number or an array");
  }

  std::vector<double> list(const std::string &key)
  {
    const ConfigValue &v = take(key);
    if (const auto *a = std::get_if<std::vector<double>>(&v))
      return *a;
    if (const double *d = std::get_if<double>(&v))
      return {*d};
    throw ConfigurationError(key + ": expected an array");
  }

  void rejectUnused() const
  {
    for (const auto &[key, value] : values_)
      if (!used_.count(key))
        throw ConfigurationError(key + ": unknown key");
  }

private:
  const ConfigValue &take(const std::string &key)
  {
    used_.insert(key);
    return values_.at(key);
  }

  std::map<std::string, ConfigValue> values_;
  std::set<std::string> used_;
};

// Positive diagonal gain, scalar or per-entry.
Eigen::VectorXd diagonalGain(Reader &r, const std::string &key, const char *name, int size, double fallback)
{
  Eigen::VectorXd d = r.has(key) ? r.vector(key, size) : Eigen::VectorXd::Constant(size, fallback);
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d(i) > 0.0))
      throw ConfigurationError(key + ": " + name + " not positive-definite");
  return d;
}

} // namespace

std::map<std::string, ConfigValue> parseKeyValues(const std::string &text)
{
  std::map<std::string, ConfigValue> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    const std::string s = trim(stripComment(line));
    if (s.empty())
      continue;
    if (s.front() == '[')
    {
      if (s.back() != ']')
        throw ConfigurationError(where + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!isIdentifier(section))
        throw ConfigurationError(where + ": invalid section name '" + section + "'");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError(where + ": expected 'key = value'");
    const std::string name = trim(s.substr(0, eq));
    if (!isIdentifier(name))
      throw ConfigurationError(where + ": invalid key '" + name + "'");
    const std::string key = section.empty() ? name : section + "." + name;
    if (out.count(key))
      throw ConfigurationError(key + ": duplicate key (" + where + ")");
    out.emplace(key, parseValue(s.substr(eq + 1), key + " (" + where + ")"));
  }
  return out;
}

RunSpec parseConfigText(const std::string &text, const std::string &base_dir)
{
  Reader r(parseKeyValues(text));
  RunSpec spec;

  if (!r.has("problem.name"))
    throw ConfigurationError("problem.name: required");
  spec.problem_name = r.string("problem.name");
  if (r.has("problem.y_bound"))
    spec.y_bound = r.number("problem.y_bound");
  try
  {
    spec.problem = builtinProblem(spec.problem_name, spec.y_bound);
  }
  catch (const ConfigurationError &e)
  {
    throw ConfigurationError(std::string("problem: ") + e.what());
  }
  const ProblemDef &p = spec.problem;

  if (r.has("mesh.nodes"))
    spec.nodes = r.integer("mesh.nodes");

  GainSet &g = spec.gains;
  g.K = diagonalGain(r, "gains.K", "K", p.m, 0.1).asDiagonal();
  g.K_x0 = diagonalGain(r, "gains.K_x0", "K_x0", p.n, 0.1).asDiagonal();
  g.K_f = diagonalGain(r, "gains.K_f", "K_f", p.n, 0.1).asDiagonal();
  g.K_gE = diagonalGain(r, "gains.K_gE", "K_gE", p.q_E, 0.1).asDiagonal();
  g.k_gI = diagonalGain(r, "gains.k_gI", "k_gI", p.q_I, 0.1);
  g.k_tf = r.has("gains.k_tf") ? r.number("gains.k_tf") : 0.1;
  if (g.k_tf < 0.0)
    throw ConfigurationError("gains.k_tf: k_tf must be nonnegative");

  GuessSpec &guess = spec.guess;
  if (r.has("guess.x"))
    guess.x = r.vector("guess.x", p.n);
  if (r.has("guess.u"))
    guess.u = r.vector("guess.u", p.m);
  if (r.has("guess.u_slope"))
    guess.u_slope = r.vector("guess.u_slope", p.m);
  if (r.has("guess.tf"))
  {
    guess.tf = r.number("guess.tf");
    if (!(guess.tf > p.t0))
      throw ConfigurationError("guess.tf: must exceed t0");
    if (!p.tf_free && guess.tf != p.tf)
      throw ConfigurationError("guess.tf: terminal time is fixed by the problem");
  }
  if (r.has("guess.file"))
  {
    const std::filesystem::path f = r.string("guess.file");
    guess.file = f.is_absolute() ? f.string() : (std::filesystem::path(base_dir) / f).string();
  }

  IntegratorConfig &ic = spec.integrator;
  const std::pair<const char *, double *> numbers[] = {
      {"integrator.rtol", &ic.rtol},     {"integrator.atol", &ic.atol},
      {"integrator.tau_max", &ic.tau_max}, {"integrator.h0", &ic.h0},
      {"integrator.h_min", &ic.h_min},   {"integrator.h_max", &ic.h_max},
      {"integrator.sample_interval", &ic.sample_interval},
  };
  for (const auto &[key, dst] : numbers)
    if (r.has(key))
      *dst = r.number(key);

  if (r.has("evolution.mesh_convection"))
    spec.mesh_convection = r.boolean("evolution.mesh_convection");
  if (r.has("output.dir"))
  {
    const std::filesystem::path d = r.string("output.dir");
    spec.output_dir = d.is_absolute() ? d.string() : (std::filesystem::path(base_dir) / d).string();
  }
  if (r.has("output.snapshots"))
    spec.snapshot_taus = r.list("output.snapshots");

  r.rejectUnused();
  validateRunSpec(spec);
  return spec;
}

RunSpec parseConfig(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigurationError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  return parseConfigText(ss.str(), parent.empty() ? "." : parent.string());
}

void validateRunSpec(const RunSpec &spec)
{
  if (spec.nodes < 3)
    throw ConfigurationError("mesh.nodes: need at least 3 nodes");
  checkProblem(spec.problem);
  checkGains(spec.problem, spec.gains);
  try
  {
    checkIntegratorConfig(spec.integrator);
  }
  catch (const ConfigurationError &e)
  {
    throw ConfigurationError(std::string("integrator: ") + e.what());
  }
  for (double t : spec.snapshot_taus)
    if (!(t >= 0.0))
      throw ConfigurationError("output.snapshots: entries must be nonnegative");
}

void applyOverrides(RunSpec &spec, const RunOverrides &o)
{
  if (o.tau_max)
    spec.integrator.tau_max = *o.tau_max;
  if (o.nodes)
    spec.nodes = *o.nodes;
  if (o.rtol)
    spec.integrator.rtol = *o.rtol;
  if (o.atol)
    spec.integrator.atol = *o.atol;
  if (o.mesh_convection)
    spec.mesh_convection = *o.mesh_convection;
  if (o.output_dir)
    spec.output_dir = *o.output_dir;
  validateRunSpec(spec);
}

namespace
{

// Linear interpolation of column col at time t, clamped to the table's span.
double interpolate(const CsvTable &table, int col, double t)
{
  const auto &rows = table.rows;
  if (t <= rows.front()[0])
    return rows.front()[col];
  if (t >= rows.back()[0])
    return rows.back()[col];
  auto it = std::upper_bound(rows.begin(), rows.end(), t,
                             [](double v, const std::vector<double> &row) { return v < row[0]; });
  const auto &hi = *it;
  const auto &lo = *(it - 1);
  const double w = (t - lo[0]) / (hi[0] - lo[0]);
  return (1.0 - w) * lo[col] + w * hi[col];
}

} // namespace

SolutionState initialGuess(const RunSpec &spec)
{
  const ProblemDef &p = spec.problem;
  const GuessSpec &g = spec.guess;
  if (g.file.empty())
  {
    const double tf = g.tf > 0.0 ? g.tf : p.tf;
    const Eigen::VectorXd x = g.x.size() ? g.x : p.x0;
    const Eigen::VectorXd u = g.u.size() ? g.u : Eigen::VectorXd::Zero(p.m);
    const Eigen::VectorXd b = g.u_slope.size() ? g.u_slope : Eigen::VectorXd::Zero(p.m);
    return constantGuess(p, spec.nodes, tf, x, u, b);
  }

  CsvTable table;
  try
  {
    table = readCsv(g.file);
  }
  catch (const IoError &e)
  {
    throw ConfigurationError(std::string("guess.file: ") + e.what());
  }
  if (static_cast<int>(table.header.size()) < 1 + p.n + p.m)
    throw ConfigurationError("guess.file: need columns t, x_1..x_n, u_1..u_m");
  if (table.rows.size() < 2)
    throw ConfigurationError("guess.file: need at least two rows");
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i][0] > table.rows[i - 1][0]))
      throw ConfigurationError("guess.file: time column must be strictly increasing");

  const double tf = !p.tf_free ? p.tf : (g.tf > 0.0 ? g.tf : table.rows.back()[0]);
  const Grid grid = makeGrid(spec.nodes, p.t0, tf);
  SolutionState s;
  s.tf = tf;
  s.X.resize(spec.nodes, p.n);
  s.U.resize(spec.nodes, p.m);
  for (int i = 0; i < spec.nodes; ++i)
  {
    for (int j = 0; j < p.n; ++j)
      s.X(i, j) = interpolate(table, 1 + j, grid.t(i));
    for (int j = 0; j < p.m; ++j)
      s.U(i, j) = interpolate(table, 1 + p.n + j, grid.t(i));
  }
  return s;
}

} // namespace vem
