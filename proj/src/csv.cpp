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

#include "vem/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vem/error.hpp"

namespace vem
{

int CsvTable::column(const std::string &name) const
{
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name)
      return static_cast<int>(i);
  throw IoError("missing column '" + name + "'");
}

std::string formatDouble(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace
{

std::string quoteField(const std::string &s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"')
      out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> splitFields(const std::string &line)
{
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i)
  {
    const char c = line[i];
    if (quoted)
    {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
      {
        cur += '"';
        ++i;
      }
      else if (c == '"')
        quoted = false;
      else
        cur += c;
    }
    else if (c == '"')
      quoted = true;
    else if (c == ',')
    {
      fields.push_back(cur);
      cur.clear();
    }
    else
      cur += c;
  }
  fields.push_back(cur);
  return fields;
}

} // namespace

std::string toCsv(const std::vector<std::string> &header, const std::vector<std::vector<double>> &rows)
{
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    if (i)
      out += ',';
    out += quoteField(header[i]);
  }
  out += '\n';
  for (const auto &row : rows)
  {
    for (std::size_t i = 0; i < row.size(); ++i)
    {
      if (i)
        out += ',';
      out += formatDouble(row[i]);
    }
    out += '\n';
  }
  return out;
}

void writeCsv(const std::string &path, const std::vector<std::string> &header,
              const std::vector<std::vector<double>> &rows)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path + " for writing");
  out << toCsv(header, rows);
  out.close();
  if (!out)
    throw IoError("failed writing " + path);
}

CsvTable readCsv(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> fields = splitFields(line);
    if (table.header.empty())
    {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                    " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string &f : fields)
    {
      char *end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || *end != '\0')
        throw IoError(path + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw IoError(path + ": empty file");
  return table;
}

} // namespace vem
