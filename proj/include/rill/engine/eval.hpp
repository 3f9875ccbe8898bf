#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/bind.hpp"
#include "rill/engine/cell.hpp"
#include "rill/engine/stats.hpp"
#include "rill/value.hpp"

namespace rill::engine {

enum class error_mode : uint8_t { fail, null };

using param_map = std::map<std::string, value>;

struct eval_env {
  exec_stats* stats = nullptr;
  const param_map* params = nullptr;
  error_mode mode = error_mode::fail;
};

namespace detail {

inline value arith(const std::string& op, const value& a, const value& b) {
  if (a.is_null() || b.is_null()) return value::null();
  if (!a.is_numeric() || !b.is_numeric()) {
    raise(errc::type_error, "operator " + op + " requires numeric operands, got " +
                                a.type_name() + " and " + b.type_name());
  }
  bool both_int = a.type() == value::kind::i64 && b.type() == value::kind::i64;
  if (both_int) {
    int64_t x = a.as_i64(), y = b.as_i64();
    if (op == "+") return value::i64(x + y);
    if (op == "-") return value::i64(x - y);
    if (op == "*") return value::i64(x * y);
    if (y == 0) raise(errc::type_error, "division by zero");
    if (op == "/") return value::i64(x / y);
    return value::i64(x % y);
  }
  double x = a.numeric(), y = b.numeric();
  if (op == "+") return value::f64(x + y);
  if (op == "-") return value::f64(x - y);
  if (op == "*") return value::f64(x * y);
  if (op == "/") return value::f64(x / y);
  return value::f64(std::fmod(x, y));
}

inline value compare_vals(const std::string& op, const value& a, const value& b) {
  if (a.is_null() || b.is_null()) return value::null();
  int c = a.compare(b);  // raises TypeError on string-vs-number and friends
  if (op == "=") return value::boolean(c == 0);
  if (op == "!=") return value::boolean(c != 0);
  if (op == "<") return value::boolean(c < 0);
  if (op == "<=") return value::boolean(c <= 0);
  if (op == ">") return value::boolean(c > 0);
  return value::boolean(c >= 0);
}

// Kleene truth: -1 null, 0 false, 1 true.
inline int truth(const value& v) {
  if (v.is_null()) return -1;
  if (v.type() != value::kind::boolean) {
    raise(errc::type_error, "expected boolean, got " + v.type_name());
  }
  return v.as_bool() ? 1 : 0;
}

inline value from_truth(int t) {
  return t < 0 ? value::null() : value::boolean(t == 1);
}

}  // namespace detail

inline value eval_expr(const bexpr& e, const row& r, const eval_env& env);

// One UDF invocation: the only place udf_calls increments. In null error mode
// a throwing UDF degrades to NULL and bumps the warning counter instead of
// failing the query.
inline value call_udf(const udf_def& def, std::vector<value> argv, const eval_env& env) {
  if (env.stats) env.stats->count_udf(def.name);
  try {
    return def.fn(argv);
  } catch (const error&) {
    if (env.mode == error_mode::null) {
      if (env.stats) env.stats->count_warning();
      return value::null();
    }
    throw;  // fail-fast keeps the original error
  } catch (const std::exception& ex) {
    if (env.mode == error_mode::null) {
      if (env.stats) env.stats->count_warning();
      return value::null();
    }
    raise(errc::udf_failed, def.name + ": " + ex.what());
  }
}

inline value eval_expr(const bexpr& e, const row& r, const eval_env& env) {
  switch (e.k) {
    case bexpr_kind::literal:
      return e.lit;
    case bexpr_kind::param: {
      if (!env.params) raise(errc::bind_error, "unbound parameter $" + e.name);
      auto it = env.params->find(e.name);
      if (it == env.params->end()) {
        raise(errc::bind_error, "unbound parameter $" + e.name);
      }
      return it->second;
    }
    case bexpr_kind::column:
      return r[static_cast<size_t>(e.col)]->force();
    case bexpr_kind::call: {
      std::vector<value> argv;
      argv.reserve(e.args.size());
      for (const auto& a : e.args) argv.push_back(eval_expr(*a, r, env));
      return call_udf(*e.udf, std::move(argv), env);
    }
    case bexpr_kind::unary: {
      if (e.op == "not") {
        int t = detail::truth(eval_expr(*e.args[0], r, env));
        return detail::from_truth(t < 0 ? -1 : 1 - t);
      }
      value v = eval_expr(*e.args[0], r, env);
      if (v.is_null()) return v;
      if (v.type() == value::kind::i64) return value::i64(-v.as_i64());
      if (v.type() == value::kind::f64) return value::f64(-v.as_f64());
      raise(errc::type_error, "unary - requires a numeric operand, got " + v.type_name());
    }
    case bexpr_kind::binary: {
      if (e.op == "and") {
        int l = detail::truth(eval_expr(*e.args[0], r, env));
        if (l == 0) return value::boolean(false);  // short-circuit keeps cells lazy
        int rt = detail::truth(eval_expr(*e.args[1], r, env));
        if (rt == 0) return value::boolean(false);
        return detail::from_truth(l < 0 || rt < 0 ? -1 : 1);
      }
      if (e.op == "or") {
        int l = detail::truth(eval_expr(*e.args[0], r, env));
        if (l == 1) return value::boolean(true);
        int rt = detail::truth(eval_expr(*e.args[1], r, env));
        if (rt == 1) return value::boolean(true);
        return detail::from_truth(l < 0 || rt < 0 ? -1 : 0);
      }
      value a = eval_expr(*e.args[0], r, env);
      value b = eval_expr(*e.args[1], r, env);
      if (e.op == "+" || e.op == "-" || e.op == "*" || e.op == "/" || e.op == "%") {
        return detail::arith(e.op, a, b);
      }
      return detail::compare_vals(e.op, a, b);
    }
    case bexpr_kind::is_null: {
      value v = eval_expr(*e.args[0], r, env);
      return value::boolean(e.negated ? !v.is_null() : v.is_null());
    }
  }
  raise(errc::type_error, "unsupported expression");
}

// WHERE / ON acceptance: NULL and FALSE both reject.
inline bool passes(const value& v) {
  if (v.is_null()) return false;
  if (v.type() != value::kind::boolean) {
    raise(errc::type_error, "predicate must be boolean, got " + v.type_name());
  }
  return v.as_bool();
}

// Three-way ordering for ORDER BY: NULLs sort last regardless of direction.
inline int order_compare(const value& a, const value& b, bool desc) {
  if (a.is_null() && b.is_null()) return 0;
  if (a.is_null()) return 1;
  if (b.is_null()) return -1;
  int c = a.compare(b);
  return desc ? -c : c;
}

}  // namespace rill::engine
