#pragma once

#include <cstdint>
#include <functional>

namespace sccl {

/// Sets the worker-thread count used by parallel_for. 0 restores the
/// default (hardware concurrency). Negative values are rejected.
void set_num_threads(int threads);

/// Currently effective worker count (>= 1).
int num_threads();

namespace detail {

/// Runs body(begin, end) over a partition of [0, count) across the active
/// worker pool. Every index lands in exactly one contiguous chunk, and each
/// chunk is traversed in ascending order by a single worker, so results that
/// reduce per-index (rather than across indices) are independent of the
/// thread count. Falls back to a single inline call when the range is small.
void parallel_chunks(std::int64_t count, double work_per_item,
                     const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace detail

/// Applies fn(i) for every i in [0, count), partitioned as described above.
/// work_per_item is a rough flop estimate used to decide whether spawning
/// threads is worthwhile at all.
template <typename Fn>
void parallel_for(std::int64_t count, double work_per_item, Fn&& fn) {
  detail::parallel_chunks(count, work_per_item,
                          [&fn](std::int64_t begin, std::int64_t end) {
                            for (std::int64_t i = begin; i < end; ++i) fn(i);
                          });
}

}  // namespace sccl
