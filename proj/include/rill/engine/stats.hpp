#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

namespace rill::engine {

// What a forced cell costs: pure compute, a ranged read, or a model call.
enum class cost_class : uint8_t { cheap, io, inference };

inline const char* cost_class_name(cost_class c) {
  switch (c) {
    case cost_class::cheap: return "CHEAP";
    case cost_class::io: return "IO";
    case cost_class::inference: return "INFERENCE";
  }
  return "?";
}

// Per-query counters. A cell counts when its thunk actually runs, never at
// creation; udf_calls count per invocation of the registered function. All
// methods are safe to call from pool threads.
class exec_stats {
 public:
  void count_udf(const std::string& name) {
    std::lock_guard lock(mu_);
    ++udf_calls_[name];
  }

  void count_forced(cost_class c) {
    forced_[static_cast<size_t>(c)].fetch_add(1, std::memory_order_relaxed);
  }

  void count_row_emitted() { rows_emitted_.fetch_add(1, std::memory_order_relaxed); }
  void count_warning() { warnings_.fetch_add(1, std::memory_order_relaxed); }
  void set_bytes_fetched(uint64_t n) { bytes_fetched_.store(n, std::memory_order_relaxed); }

  // Operators report how many rows they are holding; the high-water mark is
  // what buffered_peak_rows() reads back.
  void buffer_delta(int64_t d) {
    int64_t now = buffered_now_.fetch_add(d, std::memory_order_relaxed) + d;
    int64_t peak = buffered_peak_.load(std::memory_order_relaxed);
    while (now > peak &&
           !buffered_peak_.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
    }
  }

  uint64_t udf_calls(const std::string& name) const {
    std::lock_guard lock(mu_);
    auto it = udf_calls_.find(name);
    return it == udf_calls_.end() ? 0 : it->second;
  }

  uint64_t udf_calls_total() const {
    std::lock_guard lock(mu_);
    uint64_t n = 0;
    for (const auto& [_, c] : udf_calls_) n += c;
    return n;
  }

  std::map<std::string, uint64_t> udf_calls_by_name() const {
    std::lock_guard lock(mu_);
    return udf_calls_;
  }

  uint64_t cells_forced(cost_class c) const {
    return forced_[static_cast<size_t>(c)].load(std::memory_order_relaxed);
  }

  uint64_t rows_emitted() const { return rows_emitted_.load(std::memory_order_relaxed); }
  uint64_t warnings() const { return warnings_.load(std::memory_order_relaxed); }
  uint64_t bytes_fetched() const { return bytes_fetched_.load(std::memory_order_relaxed); }
  int64_t buffered_peak_rows() const { return buffered_peak_.load(std::memory_order_relaxed); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["udf_calls"] = nlohmann::json::object();
    {
      std::lock_guard lock(mu_);
      for (const auto& [name, n] : udf_calls_) j["udf_calls"][name] = n;
    }
    j["cells_forced"] = {
        {"CHEAP", cells_forced(cost_class::cheap)},
        {"IO", cells_forced(cost_class::io)},
        {"INFERENCE", cells_forced(cost_class::inference)},
    };
    j["rows_emitted"] = rows_emitted();
    j["bytes_fetched"] = bytes_fetched();
    j["buffered_peak_rows"] = buffered_peak_rows();
    j["warnings"] = warnings();
    return j;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, uint64_t> udf_calls_;
  std::atomic<uint64_t> forced_[3] = {0, 0, 0};
  std::atomic<uint64_t> rows_emitted_{0};
  std::atomic<uint64_t> warnings_{0};
  std::atomic<uint64_t> bytes_fetched_{0};
  std::atomic<int64_t> buffered_now_{0};
  std::atomic<int64_t> buffered_peak_{0};
};

}  // namespace rill::engine
