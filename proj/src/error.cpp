// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "pds/error.hpp"

namespace pds {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::io_failure: return "io_failure";
    case Errc::bad_magic: return "bad_magic";
    case Errc::bad_header: return "bad_header";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::truncated_payload: return "truncated_payload";
    case Errc::non_finite: return "non_finite";
    case Errc::duplicate_id: return "duplicate_id";
    case Errc::missing_column: return "missing_column";
    case Errc::duplicate_pair: return "duplicate_pair";
    case Errc::malformed_field: return "malformed_field";
    case Errc::dangling_id: return "dangling_id";
    case Errc::zero_norm: return "zero_norm";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::size_mismatch: return "size_mismatch";
    case Errc::too_large: return "too_large";
    case Errc::empty_input: return "empty_input";
    case Errc::precondition: return "precondition";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

int exit_code(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::too_large:
      return 2;
    case Errc::zero_norm:
      return 4;
    default:
      return 3;
  }
}

}  // namespace pds
