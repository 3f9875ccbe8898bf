#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rill/bench/mock_llm.hpp"
#include "rill/parquet/write.hpp"

namespace rill::bench {

// 10,000 agent-trace rows, 8 row groups, every 8th row labeled 1 by the mock:
// the fixture behind the shape runner's exact call-count assertions.
struct corpus_spec {
  int64_t rows = 10000;
  int64_t rows_per_group = 1250;
  uint64_t seed = 42;
  int64_t pass_period = 8;   // rows i with (i+1) % period == 0 pass
  int64_t pass_label = 1;    // ... meaning mock_label(content) == pass_label
  int64_t labels = 8;
  int64_t rows_per_session = 20;
  size_t content_min = 512;
  size_t content_max = 5120;
};

struct trace_columns {
  std::vector<std::string> names{"session_id", "turn", "tool", "content", "is_error"};
  std::vector<std::vector<value>> data;  // columnar, names order
};

namespace detail {

inline std::string random_content(std::mt19937_64& rng, size_t min_len, size_t max_len) {
  static constexpr char alphabet[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,:;!?-_()[]{}";
  std::uniform_int_distribution<size_t> len_d(min_len, max_len);
  std::uniform_int_distribution<size_t> ch_d(0, sizeof(alphabet) - 2);
  std::string s(len_d(rng), '\0');
  for (auto& c : s) c = alphabet[ch_d(rng)];
  return s;
}

}  // namespace detail

inline trace_columns build_trace_rows(const corpus_spec& spec) {
  static constexpr std::array<const char*, 5> tools{"search", "fetch", "code", "plan",
                                                    "reply"};
  trace_columns out;
  out.data.resize(out.names.size());
  for (auto& col : out.data) col.reserve(static_cast<size_t>(spec.rows));
  for (int64_t i = 0; i < spec.rows; ++i) {
    // One generator per row keyed on (seed, i): rows are independently
    // reproducible, so rejection sampling one row never shifts its neighbors.
    std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(i));
    bool want_pass = (i + 1) % spec.pass_period == 0;
    std::string content;
    do {
      content = detail::random_content(rng, spec.content_min, spec.content_max);
    } while ((mock_label({value::str(content)}, spec.labels) == spec.pass_label) !=
             want_pass);
    char sid[16];
    std::snprintf(sid, sizeof(sid), "s-%04lld",
                  static_cast<long long>(i / spec.rows_per_session));
    std::uniform_int_distribution<size_t> tool_d(0, tools.size() - 1);
    std::uniform_int_distribution<int> err_d(0, 19);
    out.data[0].push_back(value::str(sid));
    out.data[1].push_back(value::i64(i % spec.rows_per_session));
    out.data[2].push_back(value::str(tools[tool_d(rng)]));
    out.data[3].push_back(value::str(std::move(content)));
    out.data[4].push_back(value::boolean(err_d(rng) == 0));
  }
  return out;
}

inline byte_buffer build_trace_corpus(const corpus_spec& spec) {
  trace_columns cols = build_trace_rows(spec);
  std::vector<parquet::write_column> schema{
      {"session_id", parquet::physical_type::byte_array, parquet::logical_kind::string,
       false},
      {"turn", parquet::physical_type::int64, parquet::logical_kind::none, false},
      {"tool", parquet::physical_type::byte_array, parquet::logical_kind::string, false},
      {"content", parquet::physical_type::byte_array, parquet::logical_kind::string,
       false},
      {"is_error", parquet::physical_type::boolean, parquet::logical_kind::none, false},
  };
  parquet::write_options opt;
  opt.row_group_rows = spec.rows_per_group;
  return parquet::write_table(schema, cols.data, opt);
}

inline void write_trace_corpus(const std::string& path, const corpus_spec& spec = {}) {
  byte_buffer buf = build_trace_corpus(spec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(errc::transport, "cannot write corpus: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace rill::bench
