#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace roughavg::detail {

/// Runs body(i) for i in [0, count) across OpenMP threads. An exception in
/// any iteration is rethrown after the loop, lowest index first, so failures
/// are reported independently of the schedule.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace roughavg::detail
