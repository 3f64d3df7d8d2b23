// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace pds {

/// Worker count: PDS_THREADS if set and positive, else hardware concurrency.
std::size_t worker_threads();

/// Runs fn(i) for i in [0, n), split into contiguous chunks across
/// worker_threads(). fn must only write to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pds
