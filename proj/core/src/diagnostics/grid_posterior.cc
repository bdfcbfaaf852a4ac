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

#include "dpmh/diagnostics/grid_posterior.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpmh/csv.h"

namespace dpmh::diagnostics {

std::optional<std::size_t> GridPosterior::CellIndex(
    std::span<const double> theta) const {
  if (theta.size() != axes_.size()) return std::nullopt;
  std::size_t cell = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const GridAxis& axis = axes_[j];
    if (!(theta[j] >= axis.lower && theta[j] <= axis.upper)) {
      return std::nullopt;
    }
    int64_t k = static_cast<int64_t>(
        std::floor((theta[j] - axis.lower) / axis.cell_width()));
    k = std::clamp<int64_t>(k, 0, axis.resolution - 1);
    cell = cell * static_cast<std::size_t>(axis.resolution) +
           static_cast<std::size_t>(k);
  }
  return cell;
}

std::vector<int64_t> GridPosterior::AxisIndices(std::size_t cell) const {
  std::vector<int64_t> indices(axes_.size());
  for (std::size_t j = axes_.size(); j-- > 0;) {
    const auto r = static_cast<std::size_t>(axes_[j].resolution);
    indices[j] = static_cast<int64_t>(cell % r);
    cell /= r;
  }
  return indices;
}

Vector GridPosterior::CellCenter(std::size_t cell) const {
  const std::vector<int64_t> indices = AxisIndices(cell);
  Vector center(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    center[j] = axes_[j].center(indices[j]);
  }
  return center;
}

absl::StatusOr<GridPosterior> ComputeGridPosterior(const EnergyModel& model,
                                                   std::vector<GridAxis> axes) {
  if (axes.size() != model.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "grid has ", axes.size(), " axes, model dimension is ", model.dim()));
  }
  if (axes.empty() || axes.size() > 2) {
    return absl::InvalidArgumentError("grid posterior supports 1 or 2 axes");
  }
  std::size_t cells = 1;
  for (const GridAxis& axis : axes) {
    if (axis.resolution < 1) {
      return absl::InvalidArgumentError("grid resolution must be at least 1");
    }
    if (!(axis.lower < axis.upper) || !std::isfinite(axis.lower) ||
        !std::isfinite(axis.upper)) {
      return absl::InvalidArgumentError("grid axis needs finite lower < upper");
    }
    cells *= static_cast<std::size_t>(axis.resolution);
  }
  GridPosterior shape(axes, {});
  std::vector<double> log_density(cells);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cells; ++c) {
    const Vector theta = shape.CellCenter(c);
    log_density[c] = model.LogPrior(theta) - model.TotalEnergy(theta);
    if (std::isnan(log_density[c])) {
      return absl::InternalError("NaN log density on the grid");
    }
    max_log = std::max(max_log, log_density[c]);
  }
  if (!std::isfinite(max_log)) {
    return absl::InternalError("posterior mass underflows on every cell");
  }
  std::vector<double> probabilities(cells);
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    probabilities[c] = std::exp(log_density[c] - max_log);
    total += probabilities[c];
  }
  for (double& p : probabilities) p /= total;
  return GridPosterior(std::move(axes), std::move(probabilities));
}

absl::Status WriteGridPosteriorCsv(const std::string& path,
                                   const GridPosterior& grid) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  for (std::size_t j = 0; j < grid.axes().size(); ++j) out << 'i' << j << ',';
  out << "probability\n";
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    for (int64_t k : grid.AxisIndices(c)) out << k << ',';
    out << FormatDouble(grid.probabilities()[c]) << '\n';
  }
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace dpmh::diagnostics
