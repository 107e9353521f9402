#include "sccl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "sccl/errors.hpp"

namespace sccl {

namespace {

std::atomic<int> g_threads{0};  // 0 = auto

int hardware_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

void set_num_threads(int threads) {
  if (threads < 0) throw ArgumentError("thread count must be >= 0");
  g_threads.store(threads, std::memory_order_relaxed);
}

int num_threads() {
  const int t = g_threads.load(std::memory_order_relaxed);
  return t == 0 ? hardware_threads() : t;
}

namespace detail {

void parallel_chunks(std::int64_t count, double work_per_item,
                     const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (count <= 0) return;
  const int workers = std::min<std::int64_t>(num_threads(), count);
  // Spawning a thread costs far more than a few thousand flops.
  constexpr double kMinWorkPerThread = 16384.0;
  if (workers == 1 || work_per_item * static_cast<double>(count) <
                          kMinWorkPerThread * static_cast<double>(workers)) {
    body(0, count);
    return;
  }

  // Contiguous chunks: worker w gets [w*count/workers, (w+1)*count/workers).
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&](int w) {
    const std::int64_t begin = count * w / workers;
    const std::int64_t end = count * (w + 1) / workers;
    try {
      body(begin, end);
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };
  for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace detail

}  // namespace sccl
