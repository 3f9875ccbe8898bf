#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/bind.hpp"
#include "rill/engine/catalog.hpp"
#include "rill/engine/exec.hpp"
#include "rill/engine/parser.hpp"
#include "rill/io/fetch_log.hpp"

namespace rill::engine {

namespace detail {

inline void register_builtins(catalog& cat) {
  auto want_str = [](const value& v, const char* fn) -> const std::string& {
    if (v.type() != value::kind::str) {
      raise(errc::type_error, std::string(fn) + " requires a string, got " + v.type_name());
    }
    return v.as_str();
  };

  cat.register_udf({"length", 1, udf_kind::sync, 0, [want_str](const std::vector<value>& a) {
                      if (a[0].is_null()) return value::null();
                      return value::i64(static_cast<int64_t>(want_str(a[0], "length").size()));
                    }});
  cat.register_udf({"upper", 1, udf_kind::sync, 0, [want_str](const std::vector<value>& a) {
                      if (a[0].is_null()) return value::null();
                      std::string s = want_str(a[0], "upper");
                      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                      return value::str(std::move(s));
                    }});
  cat.register_udf({"lower", 1, udf_kind::sync, 0, [want_str](const std::vector<value>& a) {
                      if (a[0].is_null()) return value::null();
                      std::string s = want_str(a[0], "lower");
                      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                      return value::str(std::move(s));
                    }});
  cat.register_udf({"abs", 1, udf_kind::sync, 0, [](const std::vector<value>& a) {
                      if (a[0].is_null()) return value::null();
                      if (a[0].type() == value::kind::i64) {
                        int64_t v = a[0].as_i64();
                        return value::i64(v < 0 ? -v : v);
                      }
                      if (a[0].type() == value::kind::f64) {
                        return value::f64(std::fabs(a[0].as_f64()));
                      }
                      raise(errc::type_error, "abs requires a number, got " + a[0].type_name());
                    }});
  cat.register_udf({"coalesce", -1, udf_kind::sync, 0, [](const std::vector<value>& a) {
                      for (const auto& v : a) {
                        if (!v.is_null()) return v;
                      }
                      return value::null();
                    }});
  cat.register_udf({"concat", -1, udf_kind::sync, 0, [want_str](const std::vector<value>& a) {
                      std::string out;
                      for (const auto& v : a) {
                        if (v.is_null()) return value::null();
                        out += want_str(v, "concat");
                      }
                      return value::str(std::move(out));
                    }});
}

}  // namespace detail

// Registration plus the parse -> bind -> execute pipeline. A handle owns its
// own stats, cancellation token, and UDF pool; the engine owns the catalog.
class engine {
 public:
  engine() { detail::register_builtins(cat_); }

  void register_table(const std::string& name, backend_ptr backend) {
    cat_.register_table(name, std::move(backend));
  }

  void register_udf(udf_def def) { cat_.register_udf(std::move(def)); }

  const catalog& cat() const { return cat_; }
  std::vector<std::string> tables() const { return cat_.table_names(); }

  void set_error_mode(error_mode m) { mode_ = m; }
  error_mode mode() const { return mode_; }

  // Attributes bytes_fetched on query stats to this log's growth.
  void set_fetch_log(io::fetch_log_ptr log) { log_ = std::move(log); }
  const io::fetch_log_ptr& fetch_log() const { return log_; }

  logical_plan plan(std::string_view sql) const {
    return bind_plan(cat_, parse_select(sql));
  }

  std::unique_ptr<query_handle> execute(const logical_plan& p, param_map params = {}) const {
    return std::make_unique<query_handle>(p, std::move(params), mode_, log_);
  }

  std::unique_ptr<query_handle> query(std::string_view sql, param_map params = {}) const {
    return execute(plan(sql), std::move(params));
  }

  std::vector<std::vector<value>> collect(std::string_view sql, param_map params = {}) const {
    return query(sql, std::move(params))->collect();
  }

 private:
  catalog cat_;
  error_mode mode_ = error_mode::fail;
  io::fetch_log_ptr log_;
};

}  // namespace rill::engine
