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

#ifndef DPMH_TRACE_IO_H_
#define DPMH_TRACE_IO_H_

#include <cstddef>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmh/sampler.h"

namespace dpmh {

// Trace CSV columns, in order:
//   iter, theta_0 .. theta_{d-1}, branch, B, batch_kept, noise_added, xi,
//   sensitivity, log_r, accepted, eps_step, delta_step
// theta_j is the chain state after the step. branch is one of "minibatch",
// "fullbatch", "out_of_domain"; booleans are 0/1.
std::vector<std::string> TraceCsvColumns(std::size_t dim);
std::string TraceCsvHeader(std::size_t dim);
std::string TraceCsvRow(const StepRecord& record);

// Append-only per-chain writer.
class TraceCsvWriter {
 public:
  static absl::StatusOr<TraceCsvWriter> Open(const std::string& path,
                                             std::size_t dim);

  absl::Status Write(const StepRecord& record);
  absl::Status Close();

 private:
  explicit TraceCsvWriter(std::unique_ptr<std::ofstream> out)
      : out_(std::move(out)) {}

  std::unique_ptr<std::ofstream> out_;
};

absl::Status WriteTraceCsv(const std::string& path, std::size_t dim,
                           std::span<const StepRecord> trace);

}  // namespace dpmh

#endif  // DPMH_TRACE_IO_H_
