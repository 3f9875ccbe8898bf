#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <thread>
#include <vector>

namespace rill::util {

// Work queue with lazily spawned workers, bounded by a growable cap. UDF
// concurrency windows enforce their own per-definition caps; the pool only
// has to supply at least that many runnable threads.
class thread_pool {
 public:
  explicit thread_pool(size_t max_threads = 16) : max_threads_(max_threads) {}

  ~thread_pool() { shutdown(); }

  thread_pool(const thread_pool&) = delete;
  thread_pool& operator=(const thread_pool&) = delete;

  void ensure_capacity(size_t n) {
    std::lock_guard lock(mu_);
    if (n > max_threads_) max_threads_ = n;
  }

  std::future<void> submit(std::function<void()> fn) {
    std::packaged_task<void()> task(std::move(fn));
    auto fut = task.get_future();
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(task));
      if (idle_ == 0 && workers_.size() < max_threads_) {
        workers_.emplace_back([this] { worker_loop(); });
      }
    }
    cv_.notify_one();
    return fut;
  }

  void shutdown() {
    {
      std::lock_guard lock(mu_);
      if (stopping_) return;
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) {
      if (t.joinable()) t.join();
    }
    workers_.clear();
  }

 private:
  void worker_loop() {
    for (;;) {
      std::packaged_task<void()> task;
      {
        std::unique_lock lock(mu_);
        ++idle_;
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        --idle_;
        if (stopping_ && queue_.empty()) return;
        task = std::move(queue_.front());
        queue_.pop_front();
      }
      task();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::packaged_task<void()>> queue_;
  std::vector<std::thread> workers_;
  size_t max_threads_;
  size_t idle_ = 0;
  bool stopping_ = false;
};

}  // namespace rill::util
