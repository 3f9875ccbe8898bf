#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <httplib.h>

#include "rill/common.hpp"
#include "rill/io/byte_range.hpp"

namespace rill::io {

struct url_parts {
  std::string scheme;
  std::string host_port;  // "host" or "host:port"
  std::string path;       // includes query
};

inline url_parts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) raise(errc::transport, "bad url: " + url);
  url_parts p;
  p.scheme = url.substr(0, scheme_end);
  auto rest = url.substr(scheme_end + 3);
  auto slash = rest.find('/');
  if (slash == std::string::npos) {
    p.host_port = rest;
    p.path = "/";
  } else {
    p.host_port = rest.substr(0, slash);
    p.path = rest.substr(slash);
  }
  return p;
}

// Plain http(s) transport over the vendored client. One client per host,
// reused across requests; safe to call concurrently.
inline fetch_hook make_default_http_hook() {
  struct state {
    std::mutex mu;
    std::map<std::string, std::shared_ptr<httplib::Client>> clients;
  };
  auto st = std::make_shared<state>();
  return [st](const fetch_request& req) -> fetch_response {
    auto parts = split_url(req.url);
    std::shared_ptr<httplib::Client> client;
    {
      std::lock_guard lock(st->mu);
      auto key = parts.scheme + "://" + parts.host_port;
      auto it = st->clients.find(key);
      if (it == st->clients.end()) {
        client = std::make_shared<httplib::Client>(key);
        client->set_keep_alive(true);
        st->clients[key] = client;
      } else {
        client = it->second;
      }
    }
    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) headers.emplace(k, v);
    httplib::Result res = req.method == fetch_method::head
                              ? client->Head(parts.path, headers)
                              : client->Get(parts.path, headers);
    if (!res) raise(errc::transport, req.url + ": " + httplib::to_string(res.error()));
    fetch_response out;
    out.status = res->status;
    for (const auto& [k, v] : res->headers) out.headers.emplace_back(k, v);
    out.body = res->body;
    return out;
  };
}

// Wraps a hook, injecting a static header set on every request whose URL
// starts with a configured prefix. Backing for --fetch-hook-config.
inline fetch_hook make_static_header_hook(
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_prefix,
    fetch_hook base) {
  return [by_prefix = std::move(by_prefix), base = std::move(base)](
             const fetch_request& req) -> fetch_response {
    fetch_request augmented = req;
    for (const auto& [prefix, headers] : by_prefix) {
      if (req.url.rfind(prefix, 0) == 0) {
        for (const auto& h : headers) augmented.headers.push_back(h);
      }
    }
    return base(augmented);
  };
}

}  // namespace rill::io
