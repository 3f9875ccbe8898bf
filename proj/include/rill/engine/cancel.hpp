#pragma once

#include <atomic>
#include <memory>

#include "rill/common.hpp"

namespace rill::engine {

// Copyable handle onto one shared cancellation flag. Checked at every pull and
// before every thunk admission, so no new work starts once cancel() lands.
class cancel_token {
 public:
  cancel_token() : flag_(std::make_shared<std::atomic<bool>>(false)) {}

  // seq_cst so a skip observed inside a pool task is also observed by the
  // consumer that synchronized with that task's future.
  void cancel() const { flag_->store(true); }
  bool cancelled() const { return flag_->load(); }

  void check() const {
    if (cancelled()) raise(errc::cancelled, "query cancelled");
  }

 private:
  std::shared_ptr<std::atomic<bool>> flag_;
};

}  // namespace rill::engine
