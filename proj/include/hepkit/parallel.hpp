#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hepkit {

/// Rows (or integrand calls) per unit of parallel work. Chunk boundaries
/// depend only on the problem size, never on the worker count.
inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunkSize) {
  return (n + chunk - 1) / chunk;
}

/// Fixed set of worker threads executing indexed task batches.
///
/// The calling thread takes part in every batch, so a pool of size 1 spawns
/// no threads at all. If tasks throw, the exception of the lowest task index
/// is rethrown after the batch drains, which keeps error reporting
/// independent of scheduling.
class WorkerPool {
 public:
  /// `workers == 0` selects std::thread::hardware_concurrency().
  explicit WorkerPool(std::size_t workers = 1);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return threads_.size() + 1; }

  /// Runs task(i) for i in [0, n_tasks) and blocks until all complete.
  /// Not reentrant: tasks must not submit batches to the same pool.
  void run(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

 private:
  void worker_loop();
  void drain(std::unique_lock<std::mutex>& lock);

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t n_tasks_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  std::size_t active_ = 0;
  bool stop_ = false;
  std::size_t error_index_ = 0;
  std::exception_ptr error_;
};

/// Shared single-worker pool used as the default execution context.
WorkerPool& serial_pool();

/// Map-reduce over [0, n) in kChunkSize chunks. `map(begin, end)` produces a
/// partial for one chunk; partials are folded left to right in chunk order
/// with `combine(acc, partial)`. The result is bitwise independent of the
/// pool size.
template <typename T, typename Map, typename Combine>
T reduce_chunks(WorkerPool& pool, std::size_t n, T init, Map&& map, Combine&& combine,
                std::size_t chunk = kChunkSize) {
  const std::size_t n_chunks = chunk_count(n, chunk);
  std::vector<T> partials(n_chunks, init);
  pool.run(n_chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    partials[c] = map(begin, std::min(n, begin + chunk));
  });
  T acc = std::move(init);
  for (auto& p : partials) combine(acc, p);
  return acc;
}

/// Applies `body(begin, end)` over disjoint chunks of [0, n).
template <typename Body>
void for_chunks(WorkerPool& pool, std::size_t n, Body&& body, std::size_t chunk = kChunkSize) {
  pool.run(chunk_count(n, chunk), [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    body(begin, std::min(n, begin + chunk));
  });
}

}  // namespace hepkit
