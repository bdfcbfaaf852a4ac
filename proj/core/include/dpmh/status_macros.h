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

#ifndef DPMH_STATUS_MACROS_H_
#define DPMH_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPMH_STATUS_CONCAT_INNER_(x, y) x##y
#define DPMH_STATUS_CONCAT_(x, y) DPMH_STATUS_CONCAT_INNER_(x, y)

#define RETURN_IF_ERROR(expr)                    \
  do {                                           \
    const absl::Status _dpmh_status = (expr);    \
    if (!_dpmh_status.ok()) return _dpmh_status; \
  } while (0)

#define ASSIGN_OR_RETURN(lhs, rexpr)                                          \
  DPMH_ASSIGN_OR_RETURN_IMPL_(DPMH_STATUS_CONCAT_(_dpmh_statusor_, __LINE__), \
                              lhs, rexpr)

#define DPMH_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) return statusor.status();           \
  lhs = std::move(statusor).value()

#endif  // DPMH_STATUS_MACROS_H_
