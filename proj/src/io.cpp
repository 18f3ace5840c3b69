// Copyright 2026 The dpsos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "dpsos/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace dpsos::io {

ParseError::ParseError(const std::string& source, int line, int column,
                       const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) +
                         (column > 0 ? ":" + std::to_string(column) : std::string()) + ": " +
                         what),
      line_(line),
      column_(column) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

// Splits on commas, recording the 1-based column where each field starts.
void split(const std::string& line, std::vector<std::string>& fields, std::vector<int>& cols) {
  fields.clear();
  cols.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    cols.push_back(static_cast<int>(start) + 1);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

}  // namespace

Eigen::MatrixXd parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> fields;
  std::vector<int> cols;
  int lineno = 0;
  bool first_content = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    split(line, fields, cols);
    std::vector<double> row(fields.size());
    int bad = -1;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_double(fields[j], row[j]) || !std::isfinite(row[j])) {
        bad = static_cast<int>(j);
        break;
      }
    }
    if (bad >= 0) {
      if (first_content) {  // header row
        first_content = false;
        width = fields.size();
        continue;
      }
      throw ParseError(source, lineno, cols[bad], "not a finite number: '" + trim(fields[bad]) + "'");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw ParseError(source, lineno, 0,
                       "expected " + std::to_string(width) + " columns, found " +
                           std::to_string(row.size()));
    }
    first_content = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, lineno, 0, "no data rows");
  Eigen::MatrixXd Y(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) Y(i, j) = rows[i][j];
  }
  return Y;
}

Eigen::MatrixXd parse_json_dataset(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source, line, col, "invalid JSON");
  }
  if (!j.is_array() || j.empty()) throw ParseError(source, 1, 0, "expected a non-empty array of rows");
  const std::size_t width = j[0].is_array() ? j[0].size() : 0;
  if (width == 0) throw ParseError(source, 1, 0, "row 1 is not a non-empty array");
  Eigen::MatrixXd Y(j.size(), width);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    const std::string where = "row " + std::to_string(i + 1);
    if (!row.is_array() || row.size() != width) {
      throw ParseError(source, 1, 0, where + ": expected " + std::to_string(width) + " numbers");
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (!row[c].is_number() || !std::isfinite(row[c].get<double>())) {
        throw ParseError(source, 1, 0, where + ", entry " + std::to_string(c + 1) + ": not a finite number");
      }
      Y(i, c) = row[c].get<double>();
    }
  }
  return Y;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Eigen::MatrixXd load_dataset(const std::string& path) {
  const std::string text = read_file(path);
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return json ? parse_json_dataset(text, path) : parse_csv(text, path);
}

void write_csv(const Eigen::MatrixXd& Y, std::ostream& os, bool header) {
  if (header) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
    os << '\n';
  }
  char buf[64];
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), Y(i, j));
      (void)ec;
      if (j) os << ',';
      os.write(buf, ptr - buf);
    }
    os << '\n';
  }
}

std::string to_csv(const Eigen::MatrixXd& Y, bool header) {
  std::ostringstream os;
  write_csv(Y, os, header);
  return os.str();
}

}  // namespace dpsos::io
