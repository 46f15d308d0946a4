#pragma once

#include <cstdint>
#include <exception>
#include <limits>
#include <stdexcept>
#include <vector>

namespace shiryaev {

enum class Execution {
  serial,    // reference loop, trial order 0..n-1
  parallel,  // OpenMP over trials
};

/// Evaluates fn(trial) for every trial and returns the results indexed by
/// trial. Results are identical for both execution modes as long as fn
/// depends only on its argument. If any trial throws, the exception from the
/// lowest failing trial index is rethrown after the loop.
template <class Fn>
auto for_each_trial(std::int64_t trials, Execution execution, Fn&& fn)
    -> std::vector<decltype(fn(std::int64_t{}))> {
  using Result = decltype(fn(std::int64_t{}));
  if (trials < 0) throw std::invalid_argument("trial count must be non-negative");
  std::vector<Result> results(static_cast<std::size_t>(trials));

  if (execution == Execution::serial) {
    for (std::int64_t i = 0; i < trials; ++i) results[static_cast<std::size_t>(i)] = fn(i);
    return results;
  }

  std::exception_ptr first_error;
  std::int64_t first_error_index = std::numeric_limits<std::int64_t>::max();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < trials; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = fn(i);
    } catch (...) {
#pragma omp critical(shiryaev_trial_error)
      {
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

/// Number of OpenMP threads a parallel region would use.
int max_threads();

}  // namespace shiryaev
