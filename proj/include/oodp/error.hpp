// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace oodp {

/// Failure categories. The CLI maps each one to its own exit status.
enum class ErrorCode {
  InvalidInput = 2,
  Fitting = 3,
  QuasiNormal = 4,
  Offset = 5,
  RingFit = 6,
  Corner = 7,
  Cover = 8,
  Assembly = 9,
  Solve = 10,
  Format = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code);

}  // namespace oodp
