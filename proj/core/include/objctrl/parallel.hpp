// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace objctrl {

/// Worker count for internal parallel loops. Honors the OBJCTRL_THREADS
/// environment variable (read on every call), falling back to the hardware
/// concurrency. Always >= 1.
std::size_t thread_count();

/// Runs fn(i) for i in [0, n). Each index is executed exactly once; callers
/// must write only to index-owned output so results do not depend on
/// scheduling. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace objctrl
