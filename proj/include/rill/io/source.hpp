#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "rill/common.hpp"
#include "rill/io/byte_range.hpp"
#include "rill/io/fetch_log.hpp"

namespace rill::io {

inline constexpr uint64_t k_default_tail_hint = 512 * 1024;
inline constexpr int k_default_in_flight_cap = 16;

// Counting semaphore with a runtime cap; bounds in-flight reads per source.
class in_flight_gate {
 public:
  explicit in_flight_gate(int cap) : cap_(cap < 1 ? 1 : cap) {}

  void enter() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return active_ < cap_; });
    ++active_;
  }

  void leave() {
    {
      std::lock_guard lock(mu_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int cap_;
  int active_ = 0;
};

struct gate_guard {
  explicit gate_guard(in_flight_gate& g) : gate(g) { gate.enter(); }
  ~gate_guard() { gate.leave(); }
  in_flight_gate& gate;
};

// Byte-range access to one file-like object. All reads are logged.
class data_source {
 public:
  virtual ~data_source() = default;

  virtual const std::string& url() const = 0;
  virtual uint64_t length() = 0;

  // Returns exactly range.length bytes from range.offset.
  virtual byte_buffer read_range(byte_range range, fetch_purpose purpose) = 0;

  // Last min(hint, file length) bytes plus the total length. For HTTP this is
  // one HEAD then one absolute-offset GET; local files stat + read.
  virtual std::pair<byte_buffer, uint64_t> read_tail(uint64_t tail_hint,
                                                     fetch_purpose purpose) = 0;

  std::pair<byte_buffer, uint64_t> read_tail(uint64_t tail_hint) {
    return read_tail(tail_hint, fetch_purpose::tail);
  }
};

using source_ptr = std::shared_ptr<data_source>;

namespace detail {
inline uint64_t micros_since(std::chrono::steady_clock::time_point t0) {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count());
}
}  // namespace detail

class local_file_source final : public data_source {
 public:
  local_file_source(std::string path, fetch_log_ptr log,
                    int in_flight_cap = k_default_in_flight_cap)
      : path_(std::move(path)), log_(std::move(log)), gate_(in_flight_cap) {
    if (!log_) log_ = std::make_shared<fetch_log>();
  }

  const std::string& url() const override { return path_; }
  using data_source::read_tail;

  uint64_t length() override {
    std::error_code ec;
    auto n = std::filesystem::file_size(path_, ec);
    if (ec) raise(errc::transport, "cannot stat " + path_ + ": " + ec.message());
    return n;
  }

  byte_buffer read_range(byte_range range, fetch_purpose purpose) override {
    if (range.length == 0) raise(errc::range_out_of_bounds, "zero-length range");
    gate_guard guard(gate_);
    auto t0 = std::chrono::steady_clock::now();
    uint64_t len = length();
    if (range.end() > len) {
      raise(errc::range_out_of_bounds,
            path_ + ": range [" + std::to_string(range.offset) + "," +
                std::to_string(range.end()) + ") past end " + std::to_string(len));
    }
    std::ifstream in(path_, std::ios::binary);
    if (!in) raise(errc::transport, "cannot open " + path_);
    in.seekg(static_cast<std::streamoff>(range.offset));
    byte_buffer out(range.length, '\0');
    in.read(out.data(), static_cast<std::streamsize>(range.length));
    if (static_cast<uint64_t>(in.gcount()) != range.length) {
      raise(errc::transport, "short read on " + path_);
    }
    log_->append({0, path_, range, purpose, range.length, detail::micros_since(t0)});
    return out;
  }

  std::pair<byte_buffer, uint64_t> read_tail(uint64_t tail_hint,
                                             fetch_purpose purpose) override {
    if (tail_hint < 8) raise(errc::range_out_of_bounds, "tail hint below 8 bytes");
    uint64_t len = length();
    if (len == 0) raise(errc::empty_file, path_);
    uint64_t take = std::min(tail_hint, len);
    return {read_range({len - take, take}, purpose), len};
  }

  fetch_log& log() { return *log_; }

 private:
  std::string path_;
  fetch_log_ptr log_;
  in_flight_gate gate_;
};

class http_source final : public data_source {
 public:
  http_source(std::string url, fetch_hook hook, fetch_log_ptr log,
              int in_flight_cap = k_default_in_flight_cap)
      : url_(std::move(url)), hook_(std::move(hook)), log_(std::move(log)),
        gate_(in_flight_cap) {
    if (!log_) log_ = std::make_shared<fetch_log>();
  }

  const std::string& url() const override { return url_; }
  using data_source::read_tail;

  uint64_t length() override {
    {
      std::lock_guard lock(mu_);
      if (length_) return *length_;
    }
    head(fetch_purpose::tail);
    std::lock_guard lock(mu_);
    return *length_;
  }

  byte_buffer read_range(byte_range range, fetch_purpose purpose) override {
    if (range.length == 0) raise(errc::range_out_of_bounds, "zero-length range");
    gate_guard guard(gate_);
    auto t0 = std::chrono::steady_clock::now();
    fetch_request req{url_, range, fetch_method::get, {}};
    req.headers.emplace_back("Range", req.range_header());
    fetch_response resp = invoke(req);
    if (resp.status == 416) {
      raise(errc::range_out_of_bounds, url_ + ": requested range not satisfiable");
    }
    if (resp.status < 200 || resp.status >= 300) {
      raise(errc::transport, url_ + ": HTTP status " + std::to_string(resp.status));
    }
    if (resp.body.size() != range.length) {
      std::optional<uint64_t> known;
      {
        std::lock_guard lock(mu_);
        known = length_;
      }
      if (known && range.end() > *known) {
        raise(errc::range_out_of_bounds,
              url_ + ": range past end " + std::to_string(*known));
      }
      raise(errc::transport, url_ + ": expected " + std::to_string(range.length) +
                                 " bytes, got " + std::to_string(resp.body.size()));
    }
    log_->append({0, url_, range, purpose, resp.body.size(), detail::micros_since(t0)});
    return std::move(resp.body);
  }

  std::pair<byte_buffer, uint64_t> read_tail(uint64_t tail_hint,
                                             fetch_purpose purpose) override {
    if (tail_hint < 8) raise(errc::range_out_of_bounds, "tail hint below 8 bytes");
    uint64_t len = head(purpose);
    if (len == 0) raise(errc::empty_file, url_);
    uint64_t take = std::min(tail_hint, len);
    return {read_range({len - take, take}, purpose), len};
  }

 private:
  // HEAD to learn the object length; logged with zero bytes returned.
  uint64_t head(fetch_purpose purpose) {
    gate_guard guard(gate_);
    auto t0 = std::chrono::steady_clock::now();
    fetch_request req{url_, std::nullopt, fetch_method::head, {}};
    fetch_response resp = invoke(req);
    if (resp.status < 200 || resp.status >= 300) {
      raise(errc::transport, url_ + ": HEAD status " + std::to_string(resp.status));
    }
    auto cl = resp.header("Content-Length");
    if (!cl) raise(errc::transport, url_ + ": HEAD without Content-Length");
    uint64_t len = std::stoull(*cl);
    {
      std::lock_guard lock(mu_);
      length_ = len;
    }
    log_->append({0, url_, std::nullopt, purpose, 0, detail::micros_since(t0)});
    return len;
  }

  fetch_response invoke(const fetch_request& req) {
    try {
      return hook_(req);
    } catch (const error&) {
      throw;
    } catch (const std::exception& e) {
      raise(errc::transport, url_ + ": hook failure: " + e.what());
    }
  }

  std::string url_;
  fetch_hook hook_;
  fetch_log_ptr log_;
  in_flight_gate gate_;
  std::mutex mu_;
  std::optional<uint64_t> length_;
};

// In-memory source; used by tests and by the Parquet writer round-trip.
class memory_source final : public data_source {
 public:
  memory_source(std::string name, byte_buffer data, fetch_log_ptr log)
      : name_(std::move(name)), data_(std::move(data)), log_(std::move(log)) {
    if (!log_) log_ = std::make_shared<fetch_log>();
  }

  const std::string& url() const override { return name_; }
  using data_source::read_tail;
  uint64_t length() override { return data_.size(); }

  byte_buffer read_range(byte_range range, fetch_purpose purpose) override {
    if (range.length == 0) raise(errc::range_out_of_bounds, "zero-length range");
    auto t0 = std::chrono::steady_clock::now();
    if (range.end() > data_.size()) {
      raise(errc::range_out_of_bounds, name_ + ": range past end");
    }
    byte_buffer out = data_.substr(range.offset, range.length);
    log_->append({0, name_, range, purpose, out.size(), detail::micros_since(t0)});
    return out;
  }

  std::pair<byte_buffer, uint64_t> read_tail(uint64_t tail_hint,
                                             fetch_purpose purpose) override {
    if (tail_hint < 8) raise(errc::range_out_of_bounds, "tail hint below 8 bytes");
    if (data_.empty()) raise(errc::empty_file, name_);
    uint64_t take = std::min<uint64_t>(tail_hint, data_.size());
    return {read_range({data_.size() - take, take}, purpose), data_.size()};
  }

 private:
  std::string name_;
  byte_buffer data_;
  fetch_log_ptr log_;
};

// Relabels every read from the wrapped source, e.g. delete-file reads inside
// the Iceberg scan keep their own purpose while reusing the Parquet reader.
class purpose_override_source final : public data_source {
 public:
  purpose_override_source(source_ptr inner, fetch_purpose purpose)
      : inner_(std::move(inner)), purpose_(purpose) {}

  const std::string& url() const override { return inner_->url(); }
  using data_source::read_tail;
  uint64_t length() override { return inner_->length(); }

  byte_buffer read_range(byte_range range, fetch_purpose) override {
    return inner_->read_range(range, purpose_);
  }

  std::pair<byte_buffer, uint64_t> read_tail(uint64_t tail_hint, fetch_purpose) override {
    return inner_->read_tail(tail_hint, purpose_);
  }

 private:
  source_ptr inner_;
  fetch_purpose purpose_;
};

}  // namespace rill::io
