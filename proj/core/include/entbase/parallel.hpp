#pragma once

#include <cstddef>
#include <functional>

namespace entbase {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Output
/// placement is the caller's job (write into slot i); if any call throws,
/// the exception from the lowest index is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace entbase
