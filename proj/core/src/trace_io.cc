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

#include "dpmh/trace_io.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dpmh/csv.h"

namespace dpmh {

std::vector<std::string> TraceCsvColumns(std::size_t dim) {
  std::vector<std::string> columns = {"iter"};
  for (std::size_t j = 0; j < dim; ++j) {
    columns.push_back(absl::StrCat("theta_", j));
  }
  for (const char* name :
       {"branch", "B", "batch_kept", "noise_added", "xi", "sensitivity",
        "log_r", "accepted", "eps_step", "delta_step"}) {
    columns.push_back(name);
  }
  return columns;
}

std::string TraceCsvHeader(std::size_t dim) {
  return absl::StrJoin(TraceCsvColumns(dim), ",");
}

std::string TraceCsvRow(const StepRecord& record) {
  std::string row = absl::StrCat(record.iter);
  for (double v : record.theta) absl::StrAppend(&row, ",", FormatDouble(v));
  absl::StrAppend(
      &row, ",", BranchName(record.branch), ",", record.batch_size, ",",
      record.batch_kept, ",", record.noise_added ? 1 : 0, ",",
      FormatDouble(record.noise_value), ",", FormatDouble(record.sensitivity),
      ",", FormatDouble(record.log_ratio), ",", record.accepted ? 1 : 0, ",",
      FormatDouble(record.eps_spent), ",", FormatDouble(record.delta_spent));
  return row;
}

absl::StatusOr<TraceCsvWriter> TraceCsvWriter::Open(const std::string& path,
                                                    std::size_t dim) {
  auto out = std::make_unique<std::ofstream>(path);
  if (!*out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  *out << TraceCsvHeader(dim) << '\n';
  return TraceCsvWriter(std::move(out));
}

absl::Status TraceCsvWriter::Write(const StepRecord& record) {
  *out_ << TraceCsvRow(record) << '\n';
  if (!*out_) return absl::InternalError("trace write failed");
  return absl::OkStatus();
}

absl::Status TraceCsvWriter::Close() {
  out_->close();
  if (!*out_) return absl::InternalError("trace close failed");
  return absl::OkStatus();
}

absl::Status WriteTraceCsv(const std::string& path, std::size_t dim,
                           std::span<const StepRecord> trace) {
  absl::StatusOr<TraceCsvWriter> writer = TraceCsvWriter::Open(path, dim);
  if (!writer.ok()) return writer.status();
  for (const StepRecord& record : trace) {
    if (absl::Status s = writer->Write(record); !s.ok()) return s;
  }
  return writer->Close();
}

}  // namespace dpmh
