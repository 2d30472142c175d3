#pragma once

#include <cstddef>
#include <functional>

namespace cmrf {

//! Runs body(k) for k in [0, count) on up to `threads` workers (0 = hardware
//! concurrency). Results must not depend on which worker handles which index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

} // namespace cmrf
