#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rill/value.hpp"

namespace rill::engine {

struct expr;
using expr_ptr = std::shared_ptr<expr>;

enum class expr_kind : uint8_t {
  literal,  // lit
  column,   // [qualifier .] name
  param,    // $name
  star,     // bare * (select list or COUNT(*))
  call,     // name(args...)
  unary,    // op in {-, not} over args[0]
  binary,   // op over args[0], args[1]
  is_null,  // args[0] IS [NOT] NULL
};

struct expr {
  expr_kind k = expr_kind::literal;
  size_t pos = 0;  // byte offset into the query text
  value lit;
  std::string name;       // column / param / function name as written
  std::string qualifier;  // table qualifier on a column ref
  // A double-quoted token parses as a column ref but may rebind to a string
  // literal if no column matches (permissive-dialect fallback).
  bool double_quoted = false;
  bool negated = false;  // IS NOT NULL
  std::string op;
  std::vector<expr_ptr> args;
};

inline expr_ptr make_expr(expr_kind k, size_t pos) {
  auto e = std::make_shared<expr>();
  e->k = k;
  e->pos = pos;
  return e;
}

enum class join_kind : uint8_t { inner, left };

struct table_ref {
  std::string table;
  std::string alias;  // defaults to the table name
  size_t pos = 0;
};

struct join_clause {
  join_kind kind = join_kind::inner;
  table_ref table;
  expr_ptr on;
  size_t pos = 0;
};

struct select_item {
  expr_ptr e;         // null when star
  std::string alias;  // empty: derived from the expression
  bool star = false;
  size_t pos = 0;
};

struct order_item {
  expr_ptr e;
  bool desc = false;
};

struct select_stmt {
  std::vector<select_item> items;
  std::optional<table_ref> from;
  std::vector<join_clause> joins;
  expr_ptr where;
  std::vector<expr_ptr> group_by;
  std::vector<order_item> order_by;
  std::optional<int64_t> limit;
};

// Case-insensitive structural equality; used to match select items and order
// keys against GROUP BY expressions.
inline bool expr_equal(const expr& a, const expr& b) {
  auto ieq = [](const std::string& x, const std::string& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(x[i])) !=
          std::tolower(static_cast<unsigned char>(y[i]))) {
        return false;
      }
    }
    return true;
  };
  if (a.k != b.k) return false;
  switch (a.k) {
    case expr_kind::literal:
      return a.lit.equals_null_safe(b.lit);
    case expr_kind::column:
      return ieq(a.name, b.name) && ieq(a.qualifier, b.qualifier);
    case expr_kind::param:
      return a.name == b.name;
    case expr_kind::star:
      return true;
    default:
      break;
  }
  if (!ieq(a.name, b.name) || a.op != b.op || a.negated != b.negated ||
      a.args.size() != b.args.size()) {
    return false;
  }
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!expr_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace rill::engine
