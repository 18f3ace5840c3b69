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

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpsos/rng.hpp"

namespace dpsos::io {
namespace {

using Eigen::MatrixXd;

TEST(ParseCsv, HeaderBlankLinesAndValues) {
  MatrixXd Y = parse_csv("x1,x2\n1, 2.5\n\n-3e2,4\n");
  ASSERT_EQ(Y.rows(), 2);
  ASSERT_EQ(Y.cols(), 2);
  EXPECT_EQ(Y(0, 1), 2.5);
  EXPECT_EQ(Y(1, 0), -300.0);
  MatrixXd Z = parse_csv("1\n2\n");
  EXPECT_EQ(Z.rows(), 2);
}

TEST(ParseCsv, ErrorsCarryLineAndColumn) {
  try {
    parse_csv("a,b\n1,2\n3,oops\n", "data.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 3);
    EXPECT_NE(std::string(e.what()).find("data.csv:3:3"), std::string::npos);
  }
  try {
    parse_csv("1,2\n3\n", "w.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_csv("x1\n"), ParseError);
  EXPECT_THROW(parse_csv("1\nnan\n"), ParseError);
  EXPECT_THROW(parse_csv("1\ninf\n"), ParseError);
}

TEST(ParseJson, RowsAndErrors) {
  MatrixXd Y = parse_json_dataset("[[1, 2], [3, 4]]");
  EXPECT_EQ(Y(1, 0), 3.0);
  try {
    parse_json_dataset("[[1, 2],\n [3, ]]", "d.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_json_dataset("[[1, 2], [3]]"), ParseError);
  EXPECT_THROW(parse_json_dataset("{}"), ParseError);
  EXPECT_THROW(parse_json_dataset("[[\"a\"]]"), ParseError);
}

TEST(WriteCsv, RoundTripsExactly) {
  Rng rng(3);
  MatrixXd Y(30, 3);
  for (int i = 0; i < Y.size(); ++i) Y(i) = rng.normal() * std::pow(10.0, (i % 7) - 3);
  EXPECT_EQ(parse_csv(to_csv(Y)), Y);
  EXPECT_EQ(parse_csv(to_csv(Y, false)), Y);
  EXPECT_EQ(to_csv(MatrixXd::Constant(1, 2, 0.5)), "x1,x2\n0.5,0.5\n");
}

TEST(LoadDataset, DispatchesOnExtensionAndReportsMissingFiles) {
  const std::string path = ::testing::TempDir() + "/io_test.json";
  {
    std::ofstream f(path);
    f << "[[1.5], [2.5]]";
  }
  EXPECT_EQ(load_dataset(path)(1, 0), 2.5);
  std::remove(path.c_str());
  EXPECT_THROW(load_dataset(path), IoError);
}

}  // namespace
}  // namespace dpsos::io
