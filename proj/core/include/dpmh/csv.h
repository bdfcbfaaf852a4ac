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

#ifndef DPMH_CSV_H_
#define DPMH_CSV_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace dpmh {

// Shortest round-trip-safe rendering used for every numeric output:
// Shortest round-trip digits, "inf"/"-inf"/"nan" for non-finite values.
std::string FormatDouble(double value);

// Splits one CSV line on commas. Quoting is not supported.
std::vector<std::string_view> SplitCsvLine(std::string_view line);

// Removes leading and trailing ASCII whitespace.
std::string_view TrimWhitespace(std::string_view text);

// Strict parse of the whole field (surrounding whitespace allowed).
absl::StatusOr<double> ParseDouble(std::string_view field);
absl::StatusOr<long long> ParseInt(std::string_view field);

}  // namespace dpmh

#endif  // DPMH_CSV_H_
