#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rill/io/fetch_log.hpp"
#include "rill/io/http_hook.hpp"
#include "rill/io/source.hpp"

using namespace rill;
using namespace rill::io;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
  return p;
}

// Serves a buffer over the fetch-hook interface like a well-behaved object
// store: HEAD reports length, GET honors absolute ranges only.
fetch_hook buffer_hook(std::shared_ptr<std::string> data,
                       std::shared_ptr<std::vector<std::string>> seen_ranges) {
  return [data, seen_ranges](const fetch_request& req) -> fetch_response {
    if (req.method == fetch_method::head) {
      return {200, {{"Content-Length", std::to_string(data->size())}}, {}};
    }
    std::string header;
    for (const auto& [k, v] : req.headers) {
      if (k == "Range") header = v;
    }
    if (header.empty()) return {200, {}, *data};
    if (seen_ranges) seen_ranges->push_back(header);
    // absolute form only: bytes=start-end
    REQUIRE(header.rfind("bytes=", 0) == 0);
    REQUIRE(header.find('-') != std::string::npos);
    REQUIRE(header[6] != '-');  // reject the suffix form outright
    uint64_t start = std::stoull(header.substr(6));
    uint64_t last = std::stoull(header.substr(header.find('-') + 1));
    if (start >= data->size()) return {416, {}, {}};
    last = std::min<uint64_t>(last, data->size() - 1);
    return {206, {}, data->substr(start, last - start + 1)};
  };
}

}  // namespace

TEST_CASE("byte_range header uses the absolute form") {
  fetch_request req{"http://x/y", byte_range{100, 50}, fetch_method::get, {}};
  CHECK(req.range_header() == "bytes=100-149");
  fetch_request one{"http://x/y", byte_range{0, 1}, fetch_method::get, {}};
  CHECK(one.range_header() == "bytes=0-0");
}

TEST_CASE("local file source reads exact ranges") {
  auto p = temp_file("rill_io_test.bin", "0123456789abcdef");
  auto log = std::make_shared<fetch_log>();
  local_file_source src(p.string(), log);

  CHECK(src.length() == 16);
  CHECK(src.read_range({0, 4}, fetch_purpose::tail) == "0123");
  CHECK(src.read_range({10, 6}, fetch_purpose::column_chunk) == "abcdef");
  CHECK_THROWS_AS(src.read_range({10, 7}, fetch_purpose::tail), error);
  CHECK_THROWS_AS(src.read_range({0, 0}, fetch_purpose::tail), error);

  auto [tail, len] = src.read_tail(8);
  CHECK(len == 16);
  CHECK(tail == "89abcdef");
  auto [all, len2] = src.read_tail(1 << 20);
  CHECK(all.size() == 16);
  CHECK(len2 == 16);

  CHECK(log->size() == 4);  // two ranges + two tails; failures not logged
  std::filesystem::remove(p);
}

TEST_CASE("empty local file raises on tail read") {
  auto p = temp_file("rill_io_empty.bin", "");
  auto log = std::make_shared<fetch_log>();
  local_file_source src(p.string(), log);
  try {
    src.read_tail(64);
    FAIL("expected error");
  } catch (const error& e) {
    CHECK(e.code() == errc::empty_file);
  }
  std::filesystem::remove(p);
}

TEST_CASE("http source: HEAD then ranged GETs, absolute offsets only") {
  auto data = std::make_shared<std::string>(4096, 'x');
  for (size_t i = 0; i < data->size(); ++i) (*data)[i] = static_cast<char>('a' + i % 26);
  auto ranges = std::make_shared<std::vector<std::string>>();
  auto log = std::make_shared<fetch_log>();
  http_source src("http://store/obj.parquet", buffer_hook(data, ranges), log);

  auto [tail, len] = src.read_tail(256);
  CHECK(len == 4096);
  CHECK(tail == data->substr(4096 - 256));
  REQUIRE(ranges->size() == 1);
  CHECK((*ranges)[0] == "bytes=3840-4095");

  CHECK(src.read_range({0, 10}, fetch_purpose::footer) == data->substr(0, 10));
  CHECK((*ranges)[1] == "bytes=0-9");

  // HEAD is cached: only the first tail paid for it
  CHECK(src.length() == 4096);

  auto events = log->snapshot();
  REQUIRE(events.size() == 3);  // HEAD + tail GET + footer GET
  CHECK(events[0].bytes_returned == 0);
  CHECK_FALSE(events[0].range.has_value());
  CHECK(events[1].range->offset == 3840);
  CHECK(events[2].purpose == fetch_purpose::footer);
  CHECK(events[0].sequence < events[1].sequence);
}

TEST_CASE("http source: status mapping") {
  auto data = std::make_shared<std::string>("tiny");
  http_source src("http://store/x", buffer_hook(data, nullptr), nullptr);
  try {
    src.read_range({100, 5}, fetch_purpose::tail);
    FAIL("expected error");
  } catch (const error& e) {
    CHECK(e.code() == errc::range_out_of_bounds);
  }

  http_source boom("http://store/x",
                   [](const fetch_request&) -> fetch_response { return {503, {}, {}}; },
                   nullptr);
  try {
    boom.read_range({0, 1}, fetch_purpose::tail);
    FAIL("expected error");
  } catch (const error& e) {
    CHECK(e.code() == errc::transport);
  }

  http_source throws("http://store/x",
                     [](const fetch_request&) -> fetch_response {
                       throw std::runtime_error("socket reset");
                     },
                     nullptr);
  try {
    throws.read_range({0, 1}, fetch_purpose::tail);
    FAIL("expected error");
  } catch (const error& e) {
    CHECK(e.code() == errc::transport);
    CHECK(std::string(e.what()).find("socket reset") != std::string::npos);
  }
}

TEST_CASE("http source: short body is a transport error") {
  http_source src("http://store/x",
                  [](const fetch_request& req) -> fetch_response {
                    if (req.method == fetch_method::head) {
                      return {200, {{"Content-Length", "100"}}, {}};
                    }
                    return {206, {}, "abc"};  // always 3 bytes
                  },
                  nullptr);
  try {
    src.read_range({0, 10}, fetch_purpose::tail);
    FAIL("expected error");
  } catch (const error& e) {
    CHECK(e.code() == errc::transport);
  }
}

TEST_CASE("fetch log: jsonl serialization carries every field") {
  fetch_log log;
  log.append({0, "mem://a", byte_range{16, 32}, fetch_purpose::column_chunk, 32, 150});
  log.append({0, "mem://a", std::nullopt, fetch_purpose::tail, 0, 10});

  std::string jsonl = log.to_jsonl();
  auto newline = jsonl.find('\n');
  REQUIRE(newline != std::string::npos);
  auto first = nlohmann::json::parse(jsonl.substr(0, newline));
  CHECK(first["sequence"] == 0);
  CHECK(first["url"] == "mem://a");
  CHECK(first["range"]["offset"] == 16);
  CHECK(first["range"]["length"] == 32);
  CHECK(first["purpose"] == "column_chunk");
  CHECK(first["bytes_returned"] == 32);
  CHECK(first.contains("wall_micros"));
  auto second = nlohmann::json::parse(jsonl.substr(newline + 1));
  CHECK(second["sequence"] == 1);
  CHECK(second["range"].is_null());
  CHECK(second["purpose"] == "tail");
}

TEST_CASE("in-flight gate bounds concurrency") {
  in_flight_gate gate(4);
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 32; ++i) {
    threads.emplace_back([&] {
      gate_guard guard(gate);
      int now = ++active;
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      --active;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(peak.load() <= 4);
  CHECK(peak.load() >= 2);  // sanity: it did overlap
}

TEST_CASE("static header hook injects per-prefix headers") {
  std::string got_auth;
  fetch_hook base = [&](const fetch_request& req) -> fetch_response {
    for (const auto& [k, v] : req.headers) {
      if (k == "Authorization") got_auth = v;
    }
    if (req.method == fetch_method::head) {
      return {200, {{"Content-Length", "4"}}, {}};
    }
    return {206, {}, "data"};
  };
  auto hook = make_static_header_hook(
      {{"http://secure/", {{"Authorization", "Bearer tok"}}}}, base);

  http_source src("http://secure/obj", hook, nullptr);
  src.read_range({0, 4}, fetch_purpose::tail);
  CHECK(got_auth == "Bearer tok");

  got_auth.clear();
  http_source other("http://public/obj", hook, nullptr);
  other.read_range({0, 4}, fetch_purpose::tail);
  CHECK(got_auth.empty());
}

TEST_CASE("purpose override relabels reads") {
  auto log = std::make_shared<fetch_log>();
  auto mem = std::make_shared<memory_source>("mem://x", byte_buffer("0123456789"), log);
  purpose_override_source wrapped(mem, fetch_purpose::delete_file);
  wrapped.read_range({0, 3}, fetch_purpose::column_chunk);
  auto events = log->snapshot();
  REQUIRE(events.size() == 1);
  CHECK(events[0].purpose == fetch_purpose::delete_file);
}
