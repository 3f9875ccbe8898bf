#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/ast.hpp"
#include "rill/engine/catalog.hpp"
#include "rill/engine/parser.hpp"

namespace rill::engine {

struct bexpr;
using bexpr_ptr = std::shared_ptr<bexpr>;

enum class bexpr_kind : uint8_t { literal, column, param, call, unary, binary, is_null };

// Expression bound against a concrete input-row schema: column refs are
// indices, function names are resolved definitions.
struct bexpr {
  bexpr_kind k = bexpr_kind::literal;
  value lit;
  int col = -1;
  std::string name;  // param name, or column display name
  const udf_def* udf = nullptr;
  std::string op;
  bool negated = false;
  std::vector<bexpr_ptr> args;
  bool has_async = false;  // any async UDF call in this subtree
};

inline bexpr_ptr make_bexpr(bexpr_kind k) {
  auto e = std::make_shared<bexpr>();
  e->k = k;
  return e;
}

enum class plan_kind : uint8_t { scan, filter, project, join, sort, group, limit };

struct agg_spec {
  std::string fn;  // count / sum / avg / min / max (lowered)
  bexpr_ptr arg;   // null for COUNT(*)
};

struct sort_spec {
  bexpr_ptr key;
  bool desc = false;
};

struct plan_node;
using plan_ptr = std::shared_ptr<plan_node>;

struct plan_node {
  plan_kind k = plan_kind::scan;
  // scan
  std::string table;
  backend_ptr backend;  // null: the one-row zero-column source for FROM-less selects
  std::vector<column_predicate> push_literals;
  std::vector<std::pair<column_predicate, std::string>> push_params;  // filled at execute
  // tree
  plan_ptr child, right;
  // filter / join
  bexpr_ptr pred;
  join_kind jkind = join_kind::inner;
  bexpr_ptr left_key, right_key;  // right_key indexes the right child's rows
  bool build_left = false;
  // project
  std::vector<bexpr_ptr> exprs;
  // group
  std::vector<bexpr_ptr> keys;
  std::vector<agg_spec> aggs;
  // sort
  std::vector<sort_spec> sorts;
  // limit
  int64_t limit = 0;

  std::vector<std::string> out_names;
  size_t width() const { return out_names.size(); }
};

struct logical_plan {
  enum class path_kind : uint8_t { streaming, buffered };
  path_kind path = path_kind::streaming;
  plan_ptr root;
  std::vector<std::string> columns;
};

inline const char* path_name(logical_plan::path_kind p) {
  return p == logical_plan::path_kind::streaming ? "STREAMING" : "BUFFERED";
}

namespace detail {

inline bool ieq(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

inline bool is_agg_name(const std::string& lowered) {
  return lowered == "count" || lowered == "sum" || lowered == "avg" ||
         lowered == "min" || lowered == "max";
}

inline bool contains_agg(const expr& e) {
  if (e.k == expr_kind::call && is_agg_name(lower(e.name))) return true;
  for (const auto& a : e.args) {
    if (a && contains_agg(*a)) return true;
  }
  return false;
}

}  // namespace detail

// Binds a parsed statement against the catalog and arranges operators as
// scan -> filter -> group -> sort -> project -> limit. Demand from LIMIT can
// then flow straight into the projection's UDF window.
class binder {
 public:
  explicit binder(const catalog& cat) : cat_(cat) {}

  logical_plan bind(const select_stmt& stmt) {
    logical_plan out;
    plan_ptr node = bind_from(stmt);

    if (stmt.where) {
      if (detail::contains_agg(*stmt.where)) {
        raise(errc::bind_error, "aggregate not allowed in WHERE");
      }
      auto f = std::make_shared<plan_node>();
      f->k = plan_kind::filter;
      f->child = node;
      f->out_names = node->out_names;
      f->pred = bind_expr(*stmt.where);
      extract_pushdown(*stmt.where, node);
      node = f;
    }

    bool grouped = !stmt.group_by.empty();
    for (const auto& item : stmt.items) {
      if (item.e && detail::contains_agg(*item.e)) grouped = true;
    }
    for (const auto& oi : stmt.order_by) {
      if (oi.e && detail::contains_agg(*oi.e)) grouped = true;
    }

    if (grouped) {
      node = bind_group(stmt, node);
      out.path = logical_plan::path_kind::buffered;
    }

    if (!stmt.order_by.empty()) {
      auto s = std::make_shared<plan_node>();
      s->k = plan_kind::sort;
      s->child = node;
      s->out_names = node->out_names;
      for (const auto& oi : stmt.order_by) {
        sort_spec ss;
        ss.desc = oi.desc;
        ss.key = grouped ? bind_over_group(*oi.e) : bind_order_key(*oi.e, stmt);
        s->sorts.push_back(std::move(ss));
      }
      node = s;
      out.path = logical_plan::path_kind::buffered;
    }

    node = bind_project(stmt, node, grouped);

    if (stmt.limit) {
      auto l = std::make_shared<plan_node>();
      l->k = plan_kind::limit;
      l->child = node;
      l->out_names = node->out_names;
      l->limit = *stmt.limit;
      node = l;
    }

    out.root = node;
    out.columns = node->out_names;
    return out;
  }

 private:
  struct scope {
    std::string alias;
    std::vector<std::string> cols;
    size_t base = 0;  // offset of this table's columns in the combined row
  };

  plan_ptr bind_from(const select_stmt& stmt) {
    if (!stmt.from) {
      auto s = std::make_shared<plan_node>();
      s->k = plan_kind::scan;  // one empty row
      return s;
    }
    plan_ptr node = bind_scan(*stmt.from);
    for (const auto& jc : stmt.joins) {
      plan_ptr rhs = bind_scan(jc.table);
      size_t lw = node->width();

      auto j = std::make_shared<plan_node>();
      j->k = plan_kind::join;
      j->jkind = jc.kind;
      j->child = node;
      j->right = rhs;
      j->out_names = node->out_names;
      j->out_names.insert(j->out_names.end(), rhs->out_names.begin(), rhs->out_names.end());

      // scopes_ already covers both sides; bind ON over the combined row.
      bexpr_ptr on = bind_expr(*jc.on);
      if (on->k != bexpr_kind::binary || on->op != "=") {
        raise(errc::bind_error, "join condition must be an equality");
      }
      int side_l = expr_side(*on->args[0], lw);
      int side_r = expr_side(*on->args[1], lw);
      if (side_l == 0 && side_r == 1) {
        j->left_key = on->args[0];
        j->right_key = rebase(on->args[1], lw);
      } else if (side_l == 1 && side_r == 0) {
        j->left_key = on->args[1];
        j->right_key = rebase(on->args[0], lw);
      } else {
        raise(errc::bind_error,
              "join condition must equate one left-side expression with one "
              "right-side expression");
      }

      // Hash-build the smaller estimated side; LEFT JOIN probes the left side
      // so unmatched rows can stream out null-padded.
      if (jc.kind == join_kind::inner) {
        auto le = estimate_rows(node);
        auto re = estimate_rows(rhs);
        if (le && (!re || *le < *re)) j->build_left = true;
      }
      node = j;
    }
    return node;
  }

  plan_ptr bind_scan(const table_ref& ref) {
    backend_ptr backend = cat_.find_table(ref.table);
    if (!backend) {
      std::string msg = "no such table: " + ref.table;
      std::string s = suggest_name(ref.table, cat_.table_names());
      if (!s.empty()) msg += " (did you mean " + s + "?)";
      raise(errc::unknown_table, msg);
    }
    auto node = std::make_shared<plan_node>();
    node->k = plan_kind::scan;
    node->table = ref.table;
    node->backend = backend;
    node->out_names = backend->columns();

    for (const auto& sc : scopes_) {
      if (detail::ieq(sc.alias, ref.alias)) {
        raise(errc::bind_error, "duplicate table alias: " + ref.alias);
      }
    }
    scope sc;
    sc.alias = ref.alias;
    sc.cols = node->out_names;
    sc.base = total_width_;
    total_width_ += sc.cols.size();
    scopes_.push_back(std::move(sc));
    return node;
  }

  static std::optional<int64_t> estimate_rows(const plan_ptr& n) {
    if (!n) return std::nullopt;
    switch (n->k) {
      case plan_kind::scan:
        return n->backend ? n->backend->exact_row_count() : std::optional<int64_t>(1);
      case plan_kind::filter:
      case plan_kind::project:
      case plan_kind::limit:
        return estimate_rows(n->child);
      default:
        return std::nullopt;
    }
  }

  // -1: no columns, 0: all left, 1: all right, 2: mixed.
  static int expr_side(const bexpr& e, size_t left_width) {
    int side = -1;
    walk_cols(e, [&](int col) {
      int s = static_cast<size_t>(col) < left_width ? 0 : 1;
      if (side == -1) side = s;
      else if (side != s) side = 2;
    });
    return side;
  }

  template <typename F>
  static void walk_cols(const bexpr& e, F&& f) {
    if (e.k == bexpr_kind::column) f(e.col);
    for (const auto& a : e.args) {
      if (a) walk_cols(*a, f);
    }
  }

  static bexpr_ptr rebase(const bexpr_ptr& e, size_t left_width) {
    auto out = std::make_shared<bexpr>(*e);
    if (out->k == bexpr_kind::column) out->col -= static_cast<int>(left_width);
    for (auto& a : out->args) a = rebase(a, left_width);
    return out;
  }

  std::string all_columns_list() const {
    std::string out;
    bool qualify = scopes_.size() > 1;
    for (const auto& sc : scopes_) {
      for (const auto& c : sc.cols) {
        if (!out.empty()) out += ", ";
        if (qualify) out += sc.alias + ".";
        out += c;
      }
    }
    return out.empty() ? "(none)" : out;
  }

  [[noreturn]] void unknown_column(const std::string& name) const {
    raise(errc::bind_error,
          "unknown column '" + name + "'; available columns: " + all_columns_list());
  }

  std::optional<int> resolve_column(const std::string& qualifier,
                                    const std::string& name) const {
    if (!qualifier.empty()) {
      for (const auto& sc : scopes_) {
        if (!detail::ieq(sc.alias, qualifier)) continue;
        for (size_t i = 0; i < sc.cols.size(); ++i) {
          if (detail::ieq(sc.cols[i], name)) return static_cast<int>(sc.base + i);
        }
        raise(errc::bind_error, "unknown column '" + qualifier + "." + name +
                                    "'; available columns: " + all_columns_list());
      }
      raise(errc::bind_error, "unknown table alias '" + qualifier + "'");
    }
    std::optional<int> found;
    for (const auto& sc : scopes_) {
      for (size_t i = 0; i < sc.cols.size(); ++i) {
        if (detail::ieq(sc.cols[i], name)) {
          if (found) {
            raise(errc::bind_error, "ambiguous column '" + name + "'; qualify it");
          }
          found = static_cast<int>(sc.base + i);
        }
      }
    }
    return found;
  }

  bexpr_ptr bind_expr(const expr& e) {
    switch (e.k) {
      case expr_kind::literal: {
        auto b = make_bexpr(bexpr_kind::literal);
        b->lit = e.lit;
        return b;
      }
      case expr_kind::param: {
        auto b = make_bexpr(bexpr_kind::param);
        b->name = e.name;
        return b;
      }
      case expr_kind::star:
        raise(errc::bind_error, "'*' is only valid as a select item or in COUNT(*)");
      case expr_kind::column: {
        auto idx = resolve_column(e.qualifier, e.name);
        if (!idx) {
          if (e.double_quoted) {  // permissive: unbound "..." is a string literal
            auto b = make_bexpr(bexpr_kind::literal);
            b->lit = value::str(e.name);
            return b;
          }
          unknown_column(e.name);
        }
        auto b = make_bexpr(bexpr_kind::column);
        b->col = *idx;
        b->name = e.name;
        return b;
      }
      case expr_kind::call: {
        std::string lowered = detail::lower(e.name);
        if (detail::is_agg_name(lowered)) {
          raise(errc::bind_error, "aggregate " + e.name + " not allowed here");
        }
        const udf_def* def = cat_.find_udf(e.name);
        if (!def) {
          std::string msg = "no such function: " + e.name;
          auto known = cat_.udf_names();
          known.insert(known.end(), {"count", "sum", "avg", "min", "max"});
          std::string s = suggest_name(e.name, known);
          if (!s.empty()) msg += " (did you mean " + s + "?)";
          raise(errc::unknown_function, msg);
        }
        if (def->arity >= 0 && static_cast<int>(e.args.size()) != def->arity) {
          raise(errc::bind_error, "function " + def->name + " expects " +
                                      std::to_string(def->arity) + " argument(s), got " +
                                      std::to_string(e.args.size()));
        }
        auto b = make_bexpr(bexpr_kind::call);
        b->name = def->name;
        b->udf = def;
        b->has_async = (def->kind == udf_kind::async);
        for (const auto& a : e.args) {
          b->args.push_back(bind_expr(*a));
          b->has_async = b->has_async || b->args.back()->has_async;
        }
        return b;
      }
      case expr_kind::unary: {
        auto b = make_bexpr(bexpr_kind::unary);
        b->op = e.op;
        b->args = {bind_expr(*e.args[0])};
        b->has_async = b->args[0]->has_async;
        return b;
      }
      case expr_kind::binary: {
        auto b = make_bexpr(bexpr_kind::binary);
        b->op = e.op;
        b->args = {bind_expr(*e.args[0]), bind_expr(*e.args[1])};
        b->has_async = b->args[0]->has_async || b->args[1]->has_async;
        return b;
      }
      case expr_kind::is_null: {
        auto b = make_bexpr(bexpr_kind::is_null);
        b->negated = e.negated;
        b->args = {bind_expr(*e.args[0])};
        b->has_async = b->args[0]->has_async;
        return b;
      }
    }
    raise(errc::bind_error, "unsupported expression");
  }

  // ---- grouping ----

  plan_ptr bind_group(const select_stmt& stmt, plan_ptr input) {
    auto g = std::make_shared<plan_node>();
    g->k = plan_kind::group;
    g->child = input;

    for (const auto& ge : stmt.group_by) {
      if (detail::contains_agg(*ge)) {
        raise(errc::bind_error, "aggregate not allowed in GROUP BY");
      }
      g->keys.push_back(bind_expr(*ge));
      group_key_asts_.push_back(ge);
      const auto& k = g->keys.back();
      g->out_names.push_back(k->k == bexpr_kind::column ? k->name
                                                        : "key" + std::to_string(g->keys.size()));
    }

    // one accumulator per distinct aggregate call used anywhere downstream
    for (const auto& item : stmt.items) {
      if (item.e) collect_aggs(*item.e, *g);
    }
    for (const auto& oi : stmt.order_by) {
      if (oi.e) collect_aggs(*oi.e, *g);
    }
    group_node_ = g;
    return g;
  }

  void collect_aggs(const expr& e, plan_node& g) {
    if (e.k == expr_kind::call && detail::is_agg_name(detail::lower(e.name))) {
      std::string fn = detail::lower(e.name);
      for (const auto& seen : agg_asts_) {
        if (expr_equal(*seen, e)) return;  // one accumulator per distinct call
      }
      agg_spec spec;
      spec.fn = fn;
      if (fn == "count" && e.args.size() == 1 && e.args[0]->k == expr_kind::star) {
        spec.arg = nullptr;
      } else {
        if (e.args.size() != 1) {
          raise(errc::bind_error, "aggregate " + e.name + " expects 1 argument");
        }
        if (detail::contains_agg(*e.args[0])) {
          raise(errc::bind_error, "nested aggregates are not allowed");
        }
        spec.arg = bind_expr(*e.args[0]);
      }
      auto call_copy = std::make_shared<expr>(e);
      agg_asts_.push_back(call_copy);
      g.aggs.push_back(std::move(spec));
      g.out_names.push_back(fn + std::to_string(g.aggs.size()));
      return;
    }
    for (const auto& a : e.args) {
      if (a) collect_aggs(*a, g);
    }
  }

  // Rebind an expression over the group output row: group keys and aggregate
  // calls become column refs; anything else must decompose into those.
  bexpr_ptr bind_over_group(const expr& e) {
    for (size_t i = 0; i < group_key_asts_.size(); ++i) {
      if (expr_equal(*group_key_asts_[i], e)) {
        auto b = make_bexpr(bexpr_kind::column);
        b->col = static_cast<int>(i);
        b->name = group_node_->out_names[i];
        return b;
      }
    }
    for (size_t j = 0; j < agg_asts_.size(); ++j) {
      if (expr_equal(*agg_asts_[j], e)) {
        auto b = make_bexpr(bexpr_kind::column);
        b->col = static_cast<int>(group_key_asts_.size() + j);
        b->name = group_node_->out_names[b->col];
        return b;
      }
    }
    bexpr_ptr b;
    switch (e.k) {
      case expr_kind::literal:
      case expr_kind::param:
        return bind_expr(e);
      case expr_kind::column:
        raise(errc::bind_error,
              "column '" + e.name + "' must appear in GROUP BY or inside an aggregate");
      case expr_kind::star:
        raise(errc::bind_error, "'*' is not valid in a grouped select list");
      case expr_kind::call: {
        const udf_def* def = cat_.find_udf(e.name);
        if (!def) {
          std::string msg = "no such function: " + e.name;
          std::string s = suggest_name(e.name, cat_.udf_names());
          if (!s.empty()) msg += " (did you mean " + s + "?)";
          raise(errc::unknown_function, msg);
        }
        if (def->arity >= 0 && static_cast<int>(e.args.size()) != def->arity) {
          raise(errc::bind_error, "function " + def->name + " expects " +
                                      std::to_string(def->arity) + " argument(s), got " +
                                      std::to_string(e.args.size()));
        }
        b = make_bexpr(bexpr_kind::call);
        b->name = def->name;
        b->udf = def;
        b->has_async = (def->kind == udf_kind::async);
        break;
      }
      case expr_kind::unary:
        b = make_bexpr(bexpr_kind::unary);
        b->op = e.op;
        break;
      case expr_kind::binary:
        b = make_bexpr(bexpr_kind::binary);
        b->op = e.op;
        break;
      case expr_kind::is_null:
        b = make_bexpr(bexpr_kind::is_null);
        b->negated = e.negated;
        break;
    }
    for (const auto& a : e.args) {
      b->args.push_back(bind_over_group(*a));
      b->has_async = b->has_async || b->args.back()->has_async;
    }
    return b;
  }

  // ---- projection / ordering ----

  bexpr_ptr bind_order_key(const expr& e, const select_stmt& stmt) {
    // positional: ORDER BY 2
    if (e.k == expr_kind::literal && e.lit.type() == value::kind::i64) {
      int64_t pos = e.lit.as_i64();
      if (pos < 1 || pos > static_cast<int64_t>(stmt.items.size())) {
        raise(errc::bind_error, "ORDER BY position " + std::to_string(pos) +
                                    " is out of range");
      }
      const auto& item = stmt.items[static_cast<size_t>(pos - 1)];
      if (item.star || !item.e) {
        raise(errc::bind_error, "ORDER BY position refers to '*'");
      }
      return bind_expr(*item.e);
    }
    // select alias reference
    if (e.k == expr_kind::column && e.qualifier.empty()) {
      for (const auto& item : stmt.items) {
        if (!item.alias.empty() && detail::ieq(item.alias, e.name)) {
          return bind_expr(*item.e);
        }
      }
    }
    return bind_expr(e);
  }

  plan_ptr bind_project(const select_stmt& stmt, plan_ptr input, bool grouped) {
    auto p = std::make_shared<plan_node>();
    p->k = plan_kind::project;
    p->child = input;
    for (const auto& item : stmt.items) {
      if (item.star) {
        if (grouped) {
          raise(errc::bind_error, "'*' is not valid in a grouped select list");
        }
        if (scopes_.empty()) {
          raise(errc::bind_error, "SELECT * requires a FROM clause");
        }
        for (size_t i = 0; i < input->out_names.size(); ++i) {
          auto b = make_bexpr(bexpr_kind::column);
          b->col = static_cast<int>(i);
          b->name = input->out_names[i];
          p->exprs.push_back(b);
          p->out_names.push_back(input->out_names[i]);
        }
        continue;
      }
      bexpr_ptr b = grouped ? bind_over_group(*item.e) : bind_expr(*item.e);
      p->exprs.push_back(b);
      p->out_names.push_back(!item.alias.empty() ? item.alias : derived_name(*item.e));
    }
    return p;
  }

  static std::string derived_name(const expr& e) {
    switch (e.k) {
      case expr_kind::column:
        return e.name;
      case expr_kind::call:
        return detail::lower(e.name);
      case expr_kind::param:
        return "$" + e.name;
      default:
        return "expr";
    }
  }

  // ---- pushdown ----

  void extract_pushdown(const expr& e, const plan_ptr& from_node) {
    if (from_node->k != plan_kind::scan || !from_node->backend) return;
    if (scopes_.size() != 1) return;  // single-table scans only
    collect_conjuncts(e, *from_node);
  }

  void collect_conjuncts(const expr& e, plan_node& scan) {
    if (e.k == expr_kind::binary && detail::lower(e.op) == "and") {
      collect_conjuncts(*e.args[0], scan);
      collect_conjuncts(*e.args[1], scan);
      return;
    }
    if (e.k != expr_kind::binary) return;
    pred_op op;
    if (e.op == "=") op = pred_op::eq;
    else if (e.op == "<") op = pred_op::lt;
    else if (e.op == "<=") op = pred_op::le;
    else if (e.op == ">") op = pred_op::gt;
    else if (e.op == ">=") op = pred_op::ge;
    else return;

    const expr* col = e.args[0].get();
    const expr* val = e.args[1].get();
    bool flipped = false;
    if (col->k != expr_kind::column) {
      std::swap(col, val);
      flipped = true;
    }
    if (col->k != expr_kind::column || col->double_quoted) return;
    if (!resolve_column(col->qualifier, col->name)) return;
    if (flipped) {
      switch (op) {  // 5 < x  <=>  x > 5
        case pred_op::lt: op = pred_op::gt; break;
        case pred_op::le: op = pred_op::ge; break;
        case pred_op::gt: op = pred_op::lt; break;
        case pred_op::ge: op = pred_op::le; break;
        default: break;
      }
    }
    // match the backend's column spelling, not the query's
    std::string backend_col;
    for (const auto& c : scopes_[0].cols) {
      if (detail::ieq(c, col->name)) backend_col = c;
    }
    if (val->k == expr_kind::literal && !val->lit.is_null()) {
      scan.push_literals.push_back({backend_col, op, val->lit});
    } else if (val->k == expr_kind::param) {
      scan.push_params.push_back({{backend_col, op, value::null()}, val->name});
    }
  }

  const catalog& cat_;
  std::vector<scope> scopes_;
  size_t total_width_ = 0;
  plan_ptr group_node_;
  std::vector<expr_ptr> group_key_asts_;
  std::vector<expr_ptr> agg_asts_;
};

inline logical_plan bind_plan(const catalog& cat, const select_stmt& stmt) {
  return binder(cat).bind(stmt);
}

}  // namespace rill::engine
