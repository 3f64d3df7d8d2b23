// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace pds::cli {

/// Entry point of the `pds` tool. Returns the process exit code:
/// 0 success, 2 usage error, 3 data-validation error, 4 numeric failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pds::cli
