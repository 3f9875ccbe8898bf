#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/cancel.hpp"
#include "rill/engine/cell.hpp"
#include "rill/engine/stats.hpp"
#include "rill/value.hpp"

namespace rill::engine {

inline constexpr int k_default_udf_cap = 256;

enum class udf_kind : uint8_t { sync, async };

// A scalar function. Async definitions run on pool threads inside a bounded
// concurrency window; the callable itself may block (that is the point).
struct udf_def {
  std::string name;
  int arity = -1;  // -1: variadic
  udf_kind kind = udf_kind::sync;
  int concurrency_cap = k_default_udf_cap;  // async only
  std::function<value(const std::vector<value>&)> fn;
};

enum class pred_op : uint8_t { eq, ne, lt, le, gt, ge };

inline const char* pred_op_name(pred_op op) {
  switch (op) {
    case pred_op::eq: return "=";
    case pred_op::ne: return "!=";
    case pred_op::lt: return "<";
    case pred_op::le: return "<=";
    case pred_op::gt: return ">";
    case pred_op::ge: return ">=";
  }
  return "?";
}

// column <op> literal, offered to backends for row-group pruning. Backends may
// ignore any of them: the engine always re-applies the full filter.
struct column_predicate {
  std::string column;
  pred_op op = pred_op::eq;
  value literal;
};

struct scan_request {
  std::vector<column_predicate> pushdown;
  exec_stats* stats = nullptr;
  cancel_token cancel;
};

// Pull source of lazy rows for one scan execution.
class row_source {
 public:
  virtual ~row_source() = default;
  virtual std::optional<row> next() = 0;
};

// A registered table: a schema plus the ability to open independent scans.
class scan_backend {
 public:
  virtual ~scan_backend() = default;
  virtual std::vector<std::string> columns() = 0;
  // Total rows when knowable without reading data (e.g. a Parquet footer).
  virtual std::optional<int64_t> exact_row_count() { return std::nullopt; }
  virtual std::unique_ptr<row_source> scan(const scan_request& req) = 0;
};

using backend_ptr = std::shared_ptr<scan_backend>;

namespace detail {

// Levenshtein distance, early-out above `cap`.
inline size_t edit_distance(const std::string& a, const std::string& b, size_t cap) {
  if (a.size() > b.size() + cap || b.size() > a.size() + cap) return cap + 1;
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    size_t row_min = cur[0];
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > cap) return cap + 1;
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string lower_name(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

// Closest name within edit distance 2 (case-insensitive); empty when nothing
// is close enough. Ties break lexicographically.
inline std::string suggest_name(const std::string& got,
                                const std::vector<std::string>& known) {
  std::string got_l = detail::lower_name(got);
  std::string best;
  size_t best_d = 3;
  for (const auto& name : known) {
    size_t d = detail::edit_distance(got_l, detail::lower_name(name), 2);
    if (d < best_d || (d == best_d && !best.empty() && name < best)) {
      if (d <= 2) {
        best = name;
        best_d = d;
      }
    }
  }
  return best;
}

// Tables and scalar functions visible to the binder. Function lookup is
// case-insensitive; table lookup prefers an exact match, then a unique
// case-insensitive one.
class catalog {
 public:
  void register_table(const std::string& name, backend_ptr backend) {
    if (tables_.count(name)) {
      raise(errc::duplicate_name, "table already registered: " + name);
    }
    tables_[name] = std::move(backend);
  }

  void register_udf(udf_def def) {
    std::string key = detail::lower_name(def.name);
    if (udfs_.count(key)) {
      raise(errc::duplicate_name, "function already registered: " + def.name);
    }
    udfs_[key] = std::move(def);
  }

  backend_ptr find_table(const std::string& name) const {
    auto it = tables_.find(name);
    if (it != tables_.end()) return it->second;
    backend_ptr found;
    for (const auto& [k, v] : tables_) {
      if (detail::lower_name(k) == detail::lower_name(name)) {
        if (found) return nullptr;  // ambiguous
        found = v;
      }
    }
    return found;
  }

  const udf_def* find_udf(const std::string& name) const {
    auto it = udfs_.find(detail::lower_name(name));
    return it == udfs_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> table_names() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : tables_) out.push_back(k);
    return out;
  }

  std::vector<std::string> udf_names() const {
    std::vector<std::string> out;
    for (const auto& [_, def] : udfs_) out.push_back(def.name);
    return out;
  }

 private:
  std::map<std::string, backend_ptr> tables_;
  std::map<std::string, udf_def> udfs_;  // keyed by lowered name
};

}  // namespace rill::engine
