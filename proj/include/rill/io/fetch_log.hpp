#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rill/io/byte_range.hpp"

namespace rill::io {

enum class fetch_purpose {
  tail,
  footer,
  column_chunk,
  metadata_json,
  manifest_list,
  manifest,
  delete_file,
};

inline std::string_view fetch_purpose_name(fetch_purpose p) {
  switch (p) {
    case fetch_purpose::tail: return "tail";
    case fetch_purpose::footer: return "footer";
    case fetch_purpose::column_chunk: return "column_chunk";
    case fetch_purpose::metadata_json: return "metadata_json";
    case fetch_purpose::manifest_list: return "manifest_list";
    case fetch_purpose::manifest: return "manifest";
    case fetch_purpose::delete_file: return "delete_file";
  }
  return "?";
}

struct fetch_log_event {
  uint64_t sequence = 0;
  std::string url;
  std::optional<byte_range> range;
  fetch_purpose purpose = fetch_purpose::tail;
  uint64_t bytes_returned = 0;
  uint64_t wall_micros = 0;
};

// Append-only record of every byte read from any source. Safe for concurrent
// appends; the sequence counter gives a total order.
class fetch_log {
 public:
  uint64_t append(fetch_log_event ev) {
    std::lock_guard lock(mu_);
    ev.sequence = next_sequence_++;
    events_.push_back(std::move(ev));
    return events_.back().sequence;
  }

  std::vector<fetch_log_event> snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
  }

  size_t size() const {
    std::lock_guard lock(mu_);
    return events_.size();
  }

  uint64_t total_bytes() const {
    std::lock_guard lock(mu_);
    uint64_t n = 0;
    for (const auto& e : events_) n += e.bytes_returned;
    return n;
  }

  size_t count(fetch_purpose p) const {
    std::lock_guard lock(mu_);
    size_t n = 0;
    for (const auto& e : events_) n += (e.purpose == p) ? 1 : 0;
    return n;
  }

  void clear() {
    std::lock_guard lock(mu_);
    events_.clear();
  }

  // One JSON object per line, field names as in fetch_log_event.
  std::string to_jsonl() const {
    std::string out;
    for (const auto& e : snapshot()) {
      nlohmann::json j;
      j["sequence"] = e.sequence;
      j["url"] = e.url;
      if (e.range) {
        j["range"] = {{"offset", e.range->offset}, {"length", e.range->length}};
      } else {
        j["range"] = nullptr;
      }
      j["purpose"] = fetch_purpose_name(e.purpose);
      j["bytes_returned"] = e.bytes_returned;
      j["wall_micros"] = e.wall_micros;
      out += j.dump();
      out += '\n';
    }
    return out;
  }

 private:
  mutable std::mutex mu_;
  uint64_t next_sequence_ = 0;
  std::vector<fetch_log_event> events_;
};

using fetch_log_ptr = std::shared_ptr<fetch_log>;

}  // namespace rill::io
