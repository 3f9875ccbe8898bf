#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "rill/engine/engine.hpp"

namespace rill::bench {

struct mock_llm_config {
  std::chrono::microseconds delay{5000};
  int64_t labels = 8;
};

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Canonical argument rendering: strings raw, everything else as JSON, joined
// with a separator no argument can contain by construction.
inline std::string render_args(const std::vector<value>& args) {
  std::string key;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) key += '\x1f';
    key += args[i].type() == value::kind::str ? args[i].as_str()
                                              : args[i].to_json().dump();
  }
  return key;
}

// The deterministic map behind the mock: same input, same label, no sleeping.
// The corpus generator uses this directly to place passing rows.
inline int64_t mock_label(const std::vector<value>& args, int64_t labels = 8) {
  return static_cast<int64_t>(fnv1a64(render_args(args)) % static_cast<uint64_t>(labels));
}

inline value mock_llm_eval(const std::vector<value>& args, const mock_llm_config& cfg) {
  std::this_thread::sleep_for(cfg.delay);
  return value::i64(mock_label(args, cfg.labels));
}

inline engine::udf_def make_mock_llm(std::string name, mock_llm_config cfg,
                                     int concurrency_cap = engine::k_default_udf_cap) {
  engine::udf_def def;
  def.name = std::move(name);
  def.arity = -1;  // any arity; the key covers every argument
  def.kind = engine::udf_kind::async;
  def.concurrency_cap = concurrency_cap;
  def.fn = [cfg](const std::vector<value>& args) { return mock_llm_eval(args, cfg); };
  return def;
}

// Both spellings resolve to the same function, so the canonical shape SQL and
// ad-hoc queries agree.
inline void register_mock_udfs(engine::engine& eng, mock_llm_config cfg = {},
                               int concurrency_cap = engine::k_default_udf_cap) {
  eng.register_udf(make_mock_llm("mock_llm", cfg, concurrency_cap));
  eng.register_udf(make_mock_llm("llm", cfg, concurrency_cap));
}

}  // namespace rill::bench
