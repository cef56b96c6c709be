/**
 * Copyright 2026 The CohortKit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "cohort/error.hpp"

namespace cohort {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownTable:
      return "unknown_table";
    case ErrorCode::kDanglingForeignKey:
      return "dangling_foreign_key";
    case ErrorCode::kSchemaViolation:
      return "schema_violation";
    case ErrorCode::kUnknownNode:
      return "unknown_node";
    case ErrorCode::kUnknownType:
      return "unknown_type";
    case ErrorCode::kIncompatibleStep:
      return "incompatible_step";
    case ErrorCode::kZeroDescriptions:
      return "zero_descriptions";
    case ErrorCode::kZeroMarginal:
      return "zero_marginal";
    case ErrorCode::kInsufficientFeatures:
      return "insufficient_features";
    case ErrorCode::kDimensionMismatch:
      return "dimension_mismatch";
    case ErrorCode::kTooFewPositives:
      return "too_few_positives";
    case ErrorCode::kEmptyScopeComplement:
      return "empty_scope_complement";
    case ErrorCode::kParseError:
      return "parse_error";
    case ErrorCode::kUnknownFigure:
      return "unknown_figure";
    case ErrorCode::kUnknownIteration:
      return "unknown_iteration";
    case ErrorCode::kNotARedundantNeighbor:
      return "not_a_redundant_neighbor";
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kGraphTooLarge:
      return "graph_too_large";
    case ErrorCode::kIo:
      return "io_error";
  }
  return "internal";
}

}  // namespace cohort
