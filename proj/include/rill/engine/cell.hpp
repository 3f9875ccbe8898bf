#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/stats.hpp"
#include "rill/value.hpp"

namespace rill::engine {

enum class cell_state : uint8_t { unevaluated, in_flight, resolved, failed };

class deferred_cell;
using cell_ptr = std::shared_ptr<deferred_cell>;

// One lazy slot. The thunk runs at most once ever — the first force executes
// it, every later force (any thread) reuses the memoized value or rethrows the
// memoized failure. Single assignment: once resolved or failed, the state
// never changes again.
class deferred_cell {
 public:
  using thunk_fn = std::function<value()>;

  deferred_cell(cost_class cost, thunk_fn thunk, exec_stats* stats)
      : cost_(cost), thunk_(std::move(thunk)), stats_(stats) {}

  static cell_ptr make(cost_class cost, thunk_fn thunk, exec_stats* stats) {
    return std::make_shared<deferred_cell>(cost, std::move(thunk), stats);
  }

  // Pre-resolved cell: no thunk, never counts as forced.
  static cell_ptr make_resolved(value v) {
    auto c = std::make_shared<deferred_cell>(cost_class::cheap, nullptr, nullptr);
    c->state_ = cell_state::resolved;
    c->value_ = std::move(v);
    return c;
  }

  cost_class cost() const { return cost_; }

  cell_state state() const {
    std::lock_guard lock(mu_);
    return state_;
  }

  bool settled() const {
    std::lock_guard lock(mu_);
    return state_ == cell_state::resolved || state_ == cell_state::failed;
  }

  // Runs the thunk if unevaluated, blocks if another thread is running it.
  // Rethrows the memoized error if the thunk failed.
  const value& force() {
    std::unique_lock lock(mu_);
    if (state_ == cell_state::unevaluated) {
      state_ = cell_state::in_flight;
      lock.unlock();
      if (stats_) stats_->count_forced(cost_);
      value v;
      std::exception_ptr err;
      try {
        v = thunk_();
      } catch (...) {
        err = std::current_exception();
      }
      lock.lock();
      if (err) {
        error_ = err;
        state_ = cell_state::failed;
      } else {
        value_ = std::move(v);
        state_ = cell_state::resolved;
      }
      thunk_ = nullptr;  // release captured rows promptly
      cv_.notify_all();
    } else if (state_ == cell_state::in_flight) {
      cv_.wait(lock, [&] {
        return state_ == cell_state::resolved || state_ == cell_state::failed;
      });
    }
    if (state_ == cell_state::failed) std::rethrow_exception(error_);
    return value_;  // single assignment: safe to hand out unlocked
  }

 private:
  cost_class cost_;
  thunk_fn thunk_;
  exec_stats* stats_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  cell_state state_ = cell_state::unevaluated;
  value value_;
  std::exception_ptr error_;
};

// One streamed record: cells aligned with the operator's output schema.
using row = std::vector<cell_ptr>;

}  // namespace rill::engine
