#pragma once

#include <cstddef>
#include <functional>

namespace simmap {

/// Worker cap shared by every stage. 0 means "use hardware concurrency".
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Calls body(i) for i in [0, n) using contiguous static chunks. Each index
/// must be independent of every other; output placement is the caller's
/// job, so results do not depend on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace simmap
