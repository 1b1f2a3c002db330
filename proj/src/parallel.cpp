#include "hepkit/parallel.hpp"

namespace hepkit {

WorkerPool::WorkerPool(std::size_t workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  threads_.reserve(workers - 1);
  for (std::size_t i = 1; i < workers; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::drain(std::unique_lock<std::mutex>& lock) {
  while (next_ < n_tasks_) {
    const std::size_t i = next_++;
    const auto* task = task_;
    lock.unlock();
    std::exception_ptr err;
    try {
      (*task)(i);
    } catch (...) {
      err = std::current_exception();
    }
    lock.lock();
    if (err && (!error_ || i < error_index_)) {
      error_ = err;
      error_index_ = i;
    }
    if (++finished_ == n_tasks_) done_.notify_all();
  }
}

void WorkerPool::worker_loop() {
  std::unique_lock lock(mutex_);
  std::size_t seen = generation_;
  for (;;) {
    wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
    if (stop_) return;
    seen = generation_;
    ++active_;
    drain(lock);
    if (--active_ == 0) done_.notify_all();
  }
}

void WorkerPool::run(std::size_t n_tasks, const std::function<void(std::size_t)>& task) {
  if (n_tasks == 0) return;
  if (threads_.empty() || n_tasks == 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::unique_lock lock(mutex_);
  task_ = &task;
  n_tasks_ = n_tasks;
  next_ = 0;
  finished_ = 0;
  error_ = nullptr;
  ++generation_;
  wake_.notify_all();
  drain(lock);
  // Every worker must leave drain() before the counters are reset.
  done_.wait(lock, [&] { return finished_ == n_tasks_ && active_ == 0; });
  task_ = nullptr;
  n_tasks_ = 0;
  next_ = 0;
  if (error_) {
    auto err = error_;
    error_ = nullptr;
    std::rethrow_exception(err);
  }
}

WorkerPool& serial_pool() {
  static WorkerPool pool(1);
  return pool;
}

}  // namespace hepkit
