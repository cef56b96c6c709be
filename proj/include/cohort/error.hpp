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
#ifndef COHORT_ERROR_HPP_
#define COHORT_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cohort {

// Closed set of machine-readable error codes. The API layer maps these
// one-to-one onto `ApiError.code` strings.
enum class ErrorCode {
  kUnknownTable,
  kDanglingForeignKey,
  kSchemaViolation,
  kUnknownNode,
  kUnknownType,
  kIncompatibleStep,
  kZeroDescriptions,
  kZeroMarginal,
  kInsufficientFeatures,
  kDimensionMismatch,
  kTooFewPositives,
  kEmptyScopeComplement,
  kParseError,
  kUnknownFigure,
  kUnknownIteration,
  kNotARedundantNeighbor,
  kInvalidArgument,
  kGraphTooLarge,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Pipeline stage that raised the error ("extract", "select", ...), if any.
  const std::optional<std::string> &stage() const noexcept { return stage_; }
  Error &WithStage(std::string stage) {
    stage_ = std::move(stage);
    return *this;
  }

  // Step index for kIncompatibleStep, byte offset for kParseError.
  const std::optional<std::size_t> &position() const noexcept { return position_; }
  Error &WithPosition(std::size_t pos) {
    position_ = pos;
    return *this;
  }

  const std::vector<std::string> &expected() const noexcept { return expected_; }
  Error &WithExpected(std::vector<std::string> expected) {
    expected_ = std::move(expected);
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<std::string> stage_;
  std::optional<std::size_t> position_;
  std::vector<std::string> expected_;
};

}  // namespace cohort

#endif  // COHORT_ERROR_HPP_
