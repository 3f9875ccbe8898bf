#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rill/common.hpp"

namespace rill::io {

struct byte_range {
  uint64_t offset = 0;
  uint64_t length = 0;  // always > 0

  uint64_t end() const { return offset + length; }
  bool operator==(const byte_range&) const = default;
};

enum class fetch_method { get, head };

// One outgoing request as seen by the caller-supplied hook. GET with a range
// always uses an absolute-offset form (never a suffix range).
struct fetch_request {
  std::string url;
  std::optional<byte_range> range;
  fetch_method method = fetch_method::get;
  std::vector<std::pair<std::string, std::string>> headers;

  std::string range_header() const {
    if (!range) return {};
    return "bytes=" + std::to_string(range->offset) + "-" +
           std::to_string(range->end() - 1);
  }
};

struct fetch_response {
  int status = 0;
  std::vector<std::pair<std::string, std::string>> headers;
  byte_buffer body;

  std::optional<std::string> header(std::string_view name) const {
    for (const auto& [k, v] : headers) {
      if (k.size() != name.size()) continue;
      bool eq = true;
      for (size_t i = 0; i < k.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(k[i])) !=
            std::tolower(static_cast<unsigned char>(name[i]))) {
          eq = false;
          break;
        }
      }
      if (eq) return v;
    }
    return std::nullopt;
  }
};

// All remote traffic flows through a hook; the engine itself never reads
// ambient credentials. Hooks must tolerate concurrent invocation.
using fetch_hook = std::function<fetch_response(const fetch_request&)>;

}  // namespace rill::io
