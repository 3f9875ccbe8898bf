#pragma once

#include <chrono>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rill/bench/mock_llm.hpp"
#include "rill/engine/engine.hpp"

namespace rill::bench {

// The four canonical query shapes over the trace corpus, registered as
// "traces" with mock_llm available.
inline std::string shape_sql(char shape, int64_t n) {
  std::string ns = std::to_string(n);
  switch (shape) {
    case 'A': return "SELECT mock_llm(content) FROM traces LIMIT " + ns;
    case 'B': return "SELECT content FROM traces WHERE mock_llm(content) = 1 LIMIT " + ns;
    case 'C': return "SELECT content FROM traces ORDER BY mock_llm(content) LIMIT " + ns;
    case 'D': return "SELECT mock_llm(content) FROM traces WHERE turn > 0 LIMIT " + ns;
  }
  raise(errc::bind_error, std::string("unknown shape '") + shape + "'");
}

struct shape_result {
  char shape = 'A';
  int64_t n = 0;
  int64_t udf_calls = 0;
  int64_t rows = 0;
  int64_t wall_micros = 0;
  int64_t sequential_baseline_micros = 0;  // udf_calls x delay
  std::string path;

  nlohmann::json to_json() const {
    return {{"shape", std::string(1, shape)},
            {"n", n},
            {"udf_calls", udf_calls},
            {"rows", rows},
            {"wall_micros", wall_micros},
            {"sequential_baseline_micros", sequential_baseline_micros},
            {"path", path}};
  }
};

inline shape_result run_shape(engine::engine& eng, char shape, int64_t n,
                              const mock_llm_config& cfg = {}) {
  auto plan = eng.plan(shape_sql(shape, n));
  auto t0 = std::chrono::steady_clock::now();
  auto handle = eng.execute(plan);
  auto rows = handle->collect();
  auto t1 = std::chrono::steady_clock::now();
  shape_result r;
  r.shape = shape;
  r.n = n;
  r.rows = static_cast<int64_t>(rows.size());
  r.udf_calls = handle->stats().udf_calls_total();
  r.wall_micros =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  r.sequential_baseline_micros = r.udf_calls * cfg.delay.count();
  r.path = engine::path_name(plan.path);
  return r;
}

inline std::string render_jsonl(const std::vector<shape_result>& results) {
  std::string out;
  for (const auto& r : results) out += r.to_json().dump() + "\n";
  return out;
}

inline std::string render_table(const std::vector<shape_result>& results) {
  std::ostringstream out;
  out << "shape     n  udf_calls   rows  wall_ms  seq_ms  speedup  path\n";
  for (const auto& r : results) {
    double wall_ms = static_cast<double>(r.wall_micros) / 1000.0;
    double seq_ms = static_cast<double>(r.sequential_baseline_micros) / 1000.0;
    double speedup = r.wall_micros > 0
                         ? static_cast<double>(r.sequential_baseline_micros) /
                               static_cast<double>(r.wall_micros)
                         : 0.0;
    char line[160];
    std::snprintf(line, sizeof(line), "%-5c %5lld %10lld %6lld %8.1f %7.1f %7.1fx  %s\n",
                  r.shape, static_cast<long long>(r.n),
                  static_cast<long long>(r.udf_calls), static_cast<long long>(r.rows),
                  wall_ms, seq_ms, speedup, r.path.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace rill::bench
