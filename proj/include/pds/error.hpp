// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pds {

/// Failure classes. Each maps to one CLI exit code (see exit_code()).
enum class Errc {
  io_failure,
  bad_magic,
  bad_header,
  shape_mismatch,
  truncated_payload,
  non_finite,
  duplicate_id,
  missing_column,
  duplicate_pair,
  malformed_field,
  dangling_id,
  zero_norm,
  invalid_argument,
  size_mismatch,
  too_large,
  empty_input,
  precondition,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// 2 usage, 3 data validation, 4 numeric failure.
int exit_code(Errc code);

}  // namespace pds
