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

#include <string>
#include <vector>

namespace vem
{

/// Numeric table with a header row.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws IoError when absent.
  int column(const std::string &name) const;
};

/// "%.17g" rendering; round-trips through strtod exactly.
std::string formatDouble(double v);

/// Comma-separated, LF line endings, header first. Fields containing commas,
/// quotes or line breaks are quoted.
std::string toCsv(const std::vector<std::string> &header, const std::vector<std::vector<double>> &rows);

/// Throws IoError when the file cannot be written.
void writeCsv(const std::string &path, const std::vector<std::string> &header,
              const std::vector<std::vector<double>> &rows);

/// Reads a numeric CSV with a header row. Throws IoError on unreadable files
/// and malformed rows.
CsvTable readCsv(const std::string &path);

} // namespace vem
