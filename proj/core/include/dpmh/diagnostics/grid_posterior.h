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

#ifndef DPMH_DIAGNOSTICS_GRID_POSTERIOR_H_
#define DPMH_DIAGNOSTICS_GRID_POSTERIOR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"

namespace dpmh::diagnostics {

struct GridAxis {
  double lower = 0.0;
  double upper = 1.0;
  int64_t resolution = 1;

  double cell_width() const { return (upper - lower) / resolution; }
  double center(int64_t k) const { return lower + (k + 0.5) * cell_width(); }
};

// Normalized posterior mass on the cell centers of a 1-D or 2-D grid. Cells
// are stored row-major with axis 0 varying slowest.
class GridPosterior {
 public:
  GridPosterior(std::vector<GridAxis> axes, std::vector<double> probabilities)
      : axes_(std::move(axes)), probabilities_(std::move(probabilities)) {}

  const std::vector<GridAxis>& axes() const { return axes_; }
  std::span<const double> probabilities() const { return probabilities_; }
  std::size_t cell_count() const { return probabilities_.size(); }

  // Cell containing theta; nullopt outside the grid. Upper edges belong to
  // the last cell.
  std::optional<std::size_t> CellIndex(std::span<const double> theta) const;
  std::vector<int64_t> AxisIndices(std::size_t cell) const;
  Vector CellCenter(std::size_t cell) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<double> probabilities_;
};

// exp(LogPrior - TotalEnergy) at each cell center, normalized after
// subtracting the maximum log density. Supports dim <= 2.
absl::StatusOr<GridPosterior> ComputeGridPosterior(const EnergyModel& model,
                                                   std::vector<GridAxis> axes);

// CSV with header i0[,i1],probability.
absl::Status WriteGridPosteriorCsv(const std::string& path,
                                   const GridPosterior& grid);

}  // namespace dpmh::diagnostics

#endif  // DPMH_DIAGNOSTICS_GRID_POSTERIOR_H_
