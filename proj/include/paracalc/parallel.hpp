#pragma once

#include <functional>

namespace paracalc {

/// Worker count: PARACALC_THREADS when set (>=1), else hardware concurrency.
[[nodiscard]] int worker_count();

/// Force a specific worker count for this process (0 = back to automatic).
/// Used by determinism checks; normal code paths never call this.
void set_worker_count_override(int workers);

/// Run fn(i) for i in [0, count).  Work items must be independent; each
/// writes only its own slots, so results do not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace paracalc
