//
// Copyright 2026 The dpmh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpmh/csv.h"

#include <cmath>
#include <limits>
#include <string>

#include "gtest/gtest.h"

namespace dpmh {
namespace {

TEST(CsvTest, FormatDoubleRoundTrips) {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    absl::StatusOr<double> back = ParseDouble(FormatDouble(x));
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(*back, x);
  }
}

TEST(CsvTest, FormatDoubleSpecialValues) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(FormatDouble(inf), "inf");
  EXPECT_EQ(FormatDouble(-inf), "-inf");
  EXPECT_EQ(FormatDouble(std::nan("")), "nan");
  EXPECT_EQ(*ParseDouble("inf"), inf);
  EXPECT_EQ(*ParseDouble("-inf"), -inf);
}

TEST(CsvTest, ParseRejectsGarbage) {
  EXPECT_FALSE(ParseDouble("1.5x").ok());
  EXPECT_FALSE(ParseDouble("").ok());
  EXPECT_FALSE(ParseInt("3.5").ok());
  EXPECT_EQ(*ParseInt(" 12 "), 12);
}

TEST(CsvTest, SplitAndTrim) {
  const auto fields = SplitCsvLine("a, b ,,c");
  ASSERT_EQ(fields.size(), 4u);
  EXPECT_EQ(TrimWhitespace(fields[1]), "b");
  EXPECT_EQ(fields[2], "");
  EXPECT_EQ(TrimWhitespace("  \t x \r"), "x");
}

}  // namespace
}  // namespace dpmh
