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


// Dataset input/output: CSV (optional header) and JSON array-of-arrays.

#ifndef DPSOS_IO_HPP_
#define DPSOS_IO_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace dpsos::io {

// Malformed input, with a 1-based location (column 0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Rows are points. A first row that does not parse as numbers is treated as
// a header. Blank lines are skipped; all rows must have the same width.
// A file that cannot be opened for reading or writing.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Eigen::MatrixXd parse_csv(const std::string& text, const std::string& source = "<csv>");
Eigen::MatrixXd parse_json_dataset(const std::string& text,
                                   const std::string& source = "<json>");

// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);
// Dispatches on the extension: ".json" is JSON, anything else CSV.
Eigen::MatrixXd load_dataset(const std::string& path);

// Round-trippable CSV (17 significant digits), optional header x1..xd.
void write_csv(const Eigen::MatrixXd& Y, std::ostream& os, bool header = true);
std::string to_csv(const Eigen::MatrixXd& Y, bool header = true);

}  // namespace dpsos::io

#endif  // DPSOS_IO_HPP_
