#pragma once

#include <memory>
#include <string>

#include "rill/io/http_hook.hpp"
#include "rill/io/source.hpp"

namespace rill::io {

// http(s) URIs go through the fetch hook; anything else is a local path
// (with or without a file:// prefix).
inline source_ptr open_source(const std::string& uri, const fetch_hook& hook,
                              fetch_log_ptr log,
                              int in_flight_cap = k_default_in_flight_cap) {
  if (uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0) {
    return std::make_shared<http_source>(
        uri, hook ? hook : make_default_http_hook(), std::move(log), in_flight_cap);
  }
  std::string path = uri;
  if (path.rfind("file://", 0) == 0) path = path.substr(7);
  return std::make_shared<local_file_source>(std::move(path), std::move(log),
                                             in_flight_cap);
}

// Factory the Iceberg layer and SQL backends use so one fetch log and hook
// serve every file a table touches.
struct source_opener {
  fetch_hook hook;
  fetch_log_ptr log;
  int in_flight_cap = k_default_in_flight_cap;

  source_ptr operator()(const std::string& uri) const {
    return open_source(uri, hook, log, in_flight_cap);
  }
};

}  // namespace rill::io
