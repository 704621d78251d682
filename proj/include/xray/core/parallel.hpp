#pragma once

#include <cstddef>
#include <functional>

namespace xray {

/// Worker cap: the XRAY_THREADS environment variable when set to a positive
/// integer, otherwise the hardware concurrency. Re-read on every call.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. If any call
/// throws, the exception from the lowest failing index is rethrown after all
/// workers finish, so failures are reported independently of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace xray
