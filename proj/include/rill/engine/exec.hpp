#pragma once

#include <algorithm>
#include <deque>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/bind.hpp"
#include "rill/engine/cancel.hpp"
#include "rill/engine/cell.hpp"
#include "rill/engine/eval.hpp"
#include "rill/engine/stats.hpp"
#include "rill/io/fetch_log.hpp"
#include "rill/util/thread_pool.hpp"

namespace rill::engine {

// Buffered operators refuse to hold more rows than this.
inline constexpr int64_t k_max_buffered_rows = 1'000'000;

struct exec_ctx {
  exec_stats* stats = nullptr;
  eval_env env;
  cancel_token cancel;
  util::thread_pool* pool = nullptr;
};

class operator_base {
 public:
  virtual ~operator_base() = default;
  virtual std::optional<row> next() = 0;
};

using op_ptr = std::unique_ptr<operator_base>;

namespace detail {

inline void count_async_calls(const bexpr& e, std::map<const udf_def*, int>& counts) {
  if (e.k == bexpr_kind::call && e.udf && e.udf->kind == udf_kind::async) {
    ++counts[e.udf];
  }
  for (const auto& a : e.args) {
    if (a) count_async_calls(*a, counts);
  }
}

// Rows admitted concurrently: the tightest per-definition cap, divided by how
// many calls of that definition one row issues.
inline int64_t window_row_cap(const std::vector<bexpr_ptr>& exprs) {
  std::map<const udf_def*, int> counts;
  for (const auto& e : exprs) count_async_calls(*e, counts);
  if (counts.empty()) return 1;
  int64_t cap = std::numeric_limits<int64_t>::max();
  for (const auto& [def, n] : counts) {
    cap = std::min<int64_t>(cap,
                            std::max<int64_t>(1, def->concurrency_cap / std::max(1, n)));
  }
  return cap;
}

}  // namespace detail

// Sliding window that evaluates per-row expressions on the pool with bounded
// concurrency, emitting rows in input order. Admission happens only at the
// head of next(): with cap 1 the window is strictly sequential and issues
// exactly as many evaluations as rows consumed; with a larger cap it tops the
// pipeline up to cap in-flight rows, so overshoot is at most cap - 1 beyond
// the rows the consumer actually took. A demand bound (from LIMIT) caps total
// admissions exactly.
class expr_window {
 public:
  struct entry {
    row r;
    std::vector<cell_ptr> cells;  // settled by the time next() returns
  };

  expr_window(operator_base* in, std::vector<bexpr_ptr> exprs, exec_ctx* ctx,
              int64_t demand)
      : in_(in), exprs_(std::move(exprs)), ctx_(ctx), demand_(demand) {
    cap_ = detail::window_row_cap(exprs_);
    ctx_->pool->ensure_capacity(static_cast<size_t>(std::min<int64_t>(cap_, 512)));
  }

  std::optional<entry> next() {
    fill();
    if (pending_.empty()) {
      ctx_->cancel.check();
      return std::nullopt;
    }
    pend p = std::move(pending_.front());
    pending_.pop_front();
    for (auto& f : p.done) f.wait();
    ctx_->stats->buffer_delta(-1);
    // A task admitted before cancellation may have skipped its thunk; do not
    // let the consumer force it inline after cancel.
    ctx_->cancel.check();
    entry e;
    e.r = std::move(p.e.r);
    e.cells = std::move(p.e.cells);
    return e;
  }

 private:
  struct pend {
    entry e;
    std::vector<std::future<void>> done;
  };

  void fill() {
    while (static_cast<int64_t>(pending_.size()) < cap_ &&
           (demand_ < 0 || issued_ < demand_) && !exhausted_) {
      if (ctx_->cancel.cancelled()) return;  // no new thunks after cancellation
      auto r = in_->next();
      if (!r) {
        exhausted_ = true;
        return;
      }
      pend p;
      p.e.r = std::move(*r);
      for (const auto& ex : exprs_) {
        auto cell = deferred_cell::make(
            cost_class::inference,
            [ex, rr = p.e.r, env = ctx_->env]() { return eval_expr(*ex, rr, env); },
            ctx_->stats);
        cancel_token tok = ctx_->cancel;
        p.done.push_back(ctx_->pool->submit([cell, tok] {
          if (tok.cancelled()) return;  // admitted but never started
          try {
            cell->force();
          } catch (...) {
            // failure is memoized in the cell; the consumer rethrows it
          }
        }));
        p.e.cells.push_back(std::move(cell));
      }
      ctx_->stats->buffer_delta(+1);
      pending_.push_back(std::move(p));
      ++issued_;
    }
  }

  operator_base* in_;
  std::vector<bexpr_ptr> exprs_;
  exec_ctx* ctx_;
  int64_t demand_;
  int64_t cap_ = 1;
  int64_t issued_ = 0;
  bool exhausted_ = false;
  std::deque<pend> pending_;
};

// ---- operators ----

class scan_op : public operator_base {
 public:
  scan_op(const plan_node& n, exec_ctx* ctx, const param_map& params) : ctx_(ctx) {
    if (!n.backend) {
      dual_ = true;
      return;
    }
    scan_request req;
    req.pushdown = n.push_literals;
    for (const auto& [pred, pname] : n.push_params) {
      auto it = params.find(pname);
      if (it == params.end() || it->second.is_null()) continue;  // residual filter errors instead
      column_predicate p = pred;
      p.literal = it->second;
      req.pushdown.push_back(std::move(p));
    }
    req.stats = ctx->stats;
    req.cancel = ctx->cancel;
    src_ = n.backend->scan(req);
  }

  std::optional<row> next() override {
    ctx_->cancel.check();
    if (dual_) {
      if (dual_done_) return std::nullopt;
      dual_done_ = true;
      return row{};
    }
    return src_->next();
  }

 private:
  exec_ctx* ctx_;
  std::unique_ptr<row_source> src_;
  bool dual_ = false;
  bool dual_done_ = false;
};

class filter_sync_op : public operator_base {
 public:
  filter_sync_op(op_ptr child, bexpr_ptr pred, exec_ctx* ctx)
      : child_(std::move(child)), pred_(std::move(pred)), ctx_(ctx) {}

  std::optional<row> next() override {
    for (;;) {
      ctx_->cancel.check();
      auto r = child_->next();
      if (!r) return std::nullopt;
      if (passes(eval_expr(*pred_, *r, ctx_->env))) return r;
    }
  }

 private:
  op_ptr child_;
  bexpr_ptr pred_;
  exec_ctx* ctx_;
};

class filter_async_op : public operator_base {
 public:
  filter_async_op(op_ptr child, bexpr_ptr pred, exec_ctx* ctx)
      : child_(std::move(child)),
        window_(child_.get(), {pred}, ctx, /*demand=*/-1) {}

  std::optional<row> next() override {
    for (;;) {
      auto e = window_.next();
      if (!e) return std::nullopt;
      if (passes(e->cells[0]->force())) return std::move(e->r);
    }
  }

 private:
  op_ptr child_;
  expr_window window_;
};

class project_sync_op : public operator_base {
 public:
  project_sync_op(op_ptr child, std::vector<bexpr_ptr> exprs, exec_ctx* ctx)
      : child_(std::move(child)), exprs_(std::move(exprs)), ctx_(ctx) {}

  std::optional<row> next() override {
    ctx_->cancel.check();
    auto r = child_->next();
    if (!r) return std::nullopt;
    row out;
    out.reserve(exprs_.size());
    for (const auto& ex : exprs_) {
      if (ex->k == bexpr_kind::column) {  // identity projection: no wrapper cell
        out.push_back((*r)[static_cast<size_t>(ex->col)]);
        continue;
      }
      out.push_back(deferred_cell::make(
          cost_class::cheap,
          [ex, rr = *r, env = ctx_->env]() { return eval_expr(*ex, rr, env); },
          ctx_->stats));
    }
    return out;
  }

 private:
  op_ptr child_;
  std::vector<bexpr_ptr> exprs_;
  exec_ctx* ctx_;
};

class project_async_op : public operator_base {
 public:
  project_async_op(op_ptr child, std::vector<bexpr_ptr> exprs, exec_ctx* ctx,
                   int64_t demand)
      : child_(std::move(child)), exprs_(std::move(exprs)), ctx_(ctx) {
    std::vector<bexpr_ptr> async_exprs;
    for (size_t i = 0; i < exprs_.size(); ++i) {
      if (exprs_[i]->has_async) {
        window_slot_.push_back(static_cast<int>(async_exprs.size()));
        async_exprs.push_back(exprs_[i]);
      } else {
        window_slot_.push_back(-1);
      }
    }
    window_ = std::make_unique<expr_window>(child_.get(), std::move(async_exprs), ctx,
                                            demand);
  }

  std::optional<row> next() override {
    auto e = window_->next();
    if (!e) return std::nullopt;
    row out;
    out.reserve(exprs_.size());
    for (size_t i = 0; i < exprs_.size(); ++i) {
      if (window_slot_[i] >= 0) {
        out.push_back(e->cells[static_cast<size_t>(window_slot_[i])]);
      } else if (exprs_[i]->k == bexpr_kind::column) {  // identity projection
        out.push_back(e->r[static_cast<size_t>(exprs_[i]->col)]);
      } else {
        out.push_back(deferred_cell::make(
            cost_class::cheap,
            [ex = exprs_[i], rr = e->r, env = ctx_->env]() {
              return eval_expr(*ex, rr, env);
            },
            ctx_->stats));
      }
    }
    return out;
  }

 private:
  op_ptr child_;
  std::vector<bexpr_ptr> exprs_;
  exec_ctx* ctx_;
  std::vector<int> window_slot_;  // expr index -> window cell index, -1 when lazy
  std::unique_ptr<expr_window> window_;
};

class limit_op : public operator_base {
 public:
  limit_op(op_ptr child, int64_t n) : child_(std::move(child)), left_(n) {}

  std::optional<row> next() override {
    if (left_ <= 0) return std::nullopt;  // upstream never pulled again
    auto r = child_->next();
    if (!r) {
      left_ = 0;
      return std::nullopt;
    }
    --left_;
    return r;
  }

 private:
  op_ptr child_;
  int64_t left_;
};

class join_op : public operator_base {
 public:
  join_op(op_ptr left, op_ptr right, const plan_node& n, exec_ctx* ctx)
      : left_(std::move(left)),
        right_(std::move(right)),
        ctx_(ctx),
        kind_(n.jkind),
        build_left_(n.build_left),
        left_width_(n.child->width()),
        right_width_(n.right->width()),
        left_key_(n.left_key),
        right_key_(n.right_key) {}

  std::optional<row> next() override {
    if (!built_) build();
    for (;;) {
      ctx_->cancel.check();
      if (match_at_ < matches_.size()) {
        const row& b = build_rows_[matches_[match_at_++]];
        return combine(probe_row_, b);
      }
      if (kind_ == join_kind::left && pad_pending_) {
        pad_pending_ = false;
        return combine_null_pad(probe_row_);
      }
      auto r = probe_side()->next();
      if (!r) return std::nullopt;
      probe_row_ = std::move(*r);
      matches_.clear();
      match_at_ = 0;
      value key = eval_expr(*probe_key(), probe_row_, ctx_->env);
      if (!key.is_null()) {
        auto [lo, hi] = table_.equal_range(key.hash());
        for (auto it = lo; it != hi; ++it) {
          if (build_keys_[it->second].equals(key)) matches_.push_back(it->second);
        }
      }
      if (kind_ == join_kind::left && matches_.empty()) pad_pending_ = true;
    }
  }

 private:
  operator_base* probe_side() { return build_left_ ? right_.get() : left_.get(); }
  operator_base* build_side() { return build_left_ ? left_.get() : right_.get(); }
  const bexpr_ptr& probe_key() { return build_left_ ? right_key_ : left_key_; }
  const bexpr_ptr& build_key() { return build_left_ ? left_key_ : right_key_; }

  void build() {
    built_ = true;
    for (;;) {
      ctx_->cancel.check();
      auto r = build_side()->next();
      if (!r) break;
      if (static_cast<int64_t>(build_rows_.size()) >= k_max_buffered_rows) {
        raise(errc::resource_exceeded, "join build side exceeds " +
                                           std::to_string(k_max_buffered_rows) + " rows");
      }
      value key = eval_expr(*build_key(), *r, ctx_->env);
      ctx_->stats->buffer_delta(+1);
      build_rows_.push_back(std::move(*r));
      build_keys_.push_back(key);
      if (!key.is_null()) {  // NULL keys never match anything
        table_.emplace(key.hash(), build_rows_.size() - 1);
      }
    }
  }

  row combine(const row& probe, const row& build) {
    const row& l = build_left_ ? build : probe;
    const row& r = build_left_ ? probe : build;
    row out;
    out.reserve(l.size() + r.size());
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
    return out;
  }

  row combine_null_pad(const row& probe) {
    // LEFT JOIN always probes the left side.
    row out;
    out.reserve(left_width_ + right_width_);
    out.insert(out.end(), probe.begin(), probe.end());
    for (size_t i = 0; i < right_width_; ++i) {
      out.push_back(deferred_cell::make_resolved(value::null()));
    }
    return out;
  }

  op_ptr left_, right_;
  exec_ctx* ctx_;
  join_kind kind_;
  bool build_left_;
  size_t left_width_, right_width_;
  bexpr_ptr left_key_, right_key_;

  bool built_ = false;
  std::vector<row> build_rows_;
  std::vector<value> build_keys_;
  std::unordered_multimap<size_t, size_t> table_;
  row probe_row_;
  std::vector<size_t> matches_;
  size_t match_at_ = 0;
  bool pad_pending_ = false;
};

class sort_op : public operator_base {
 public:
  sort_op(op_ptr child, const plan_node& n, exec_ctx* ctx)
      : child_(std::move(child)), ctx_(ctx) {
    for (const auto& s : n.sorts) {
      keys_.push_back(s.key);
      desc_.push_back(s.desc);
    }
  }

  std::optional<row> next() override {
    if (!sorted_) drain_and_sort();
    ctx_->cancel.check();
    if (at_ >= entries_.size()) return std::nullopt;
    ctx_->stats->buffer_delta(-1);
    return std::move(entries_[at_++].r);
  }

 private:
  struct entry {
    row r;
    std::vector<value> keys;
  };

  void drain_and_sort() {
    sorted_ = true;
    std::vector<bexpr_ptr> async_keys;
    std::vector<int> slot;  // key index -> window cell index, -1 when sync
    for (const auto& k : keys_) {
      if (k->has_async) {
        slot.push_back(static_cast<int>(async_keys.size()));
        async_keys.push_back(k);
      } else {
        slot.push_back(-1);
      }
    }
    auto add_entry = [&](row r, const std::vector<cell_ptr>* cells) {
      if (static_cast<int64_t>(entries_.size()) >= k_max_buffered_rows) {
        raise(errc::resource_exceeded, "sort buffer exceeds " +
                                           std::to_string(k_max_buffered_rows) + " rows");
      }
      entry e;
      e.r = std::move(r);
      e.keys.reserve(keys_.size());
      for (size_t i = 0; i < keys_.size(); ++i) {
        if (slot[i] >= 0) {
          e.keys.push_back((*cells)[static_cast<size_t>(slot[i])]->force());
        } else {
          e.keys.push_back(eval_expr(*keys_[i], e.r, ctx_->env));
        }
      }
      ctx_->stats->buffer_delta(+1);
      entries_.push_back(std::move(e));
    };

    if (!async_keys.empty()) {
      // Keys resolve through the bounded window: exactly one evaluation per
      // input row, with cap-wide parallelism while the buffer fills.
      expr_window win(child_.get(), async_keys, ctx_, /*demand=*/-1);
      for (;;) {
        auto e = win.next();
        if (!e) break;
        add_entry(std::move(e->r), &e->cells);
      }
    } else {
      for (;;) {
        ctx_->cancel.check();
        auto r = child_->next();
        if (!r) break;
        add_entry(std::move(*r), nullptr);
      }
    }

    std::stable_sort(entries_.begin(), entries_.end(), [&](const entry& a, const entry& b) {
      for (size_t i = 0; i < keys_.size(); ++i) {
        int c = order_compare(a.keys[i], b.keys[i], desc_[i]);
        if (c != 0) return c < 0;
      }
      return false;
    });
  }

  op_ptr child_;
  exec_ctx* ctx_;
  std::vector<bexpr_ptr> keys_;
  std::vector<bool> desc_;
  bool sorted_ = false;
  std::vector<entry> entries_;
  size_t at_ = 0;
};

class group_op : public operator_base {
 public:
  group_op(op_ptr child, const plan_node& n, exec_ctx* ctx)
      : child_(std::move(child)), ctx_(ctx), keys_(n.keys), aggs_(n.aggs) {}

  std::optional<row> next() override {
    if (!grouped_) drain();
    ctx_->cancel.check();
    if (at_ >= groups_.size()) return std::nullopt;
    ctx_->stats->buffer_delta(-1);
    group& g = groups_[at_++];
    row out;
    out.reserve(keys_.size() + aggs_.size());
    for (auto& kv : g.key_vals) out.push_back(deferred_cell::make_resolved(std::move(kv)));
    for (size_t j = 0; j < aggs_.size(); ++j) {
      out.push_back(deferred_cell::make_resolved(g.states[j].result(aggs_[j].fn)));
    }
    return out;
  }

 private:
  struct agg_state {
    int64_t count = 0;
    bool seen = false;
    bool as_float = false;
    int64_t sum_i = 0;
    double sum_f = 0;
    value extreme;

    void add(const std::string& fn, const value& v) {
      if (fn == "count") {  // COUNT(expr): non-null only
        if (!v.is_null()) ++count;
        return;
      }
      if (v.is_null()) return;
      seen = true;
      if (fn == "sum" || fn == "avg") {
        if (!v.is_numeric()) {
          raise(errc::type_error, fn + " requires numeric input, got " + v.type_name());
        }
        ++count;
        if (v.type() == value::kind::f64) as_float = true;
        if (as_float) sum_f += v.numeric();
        else sum_i += v.as_i64();
        if (as_float && sum_i != 0) {  // widen the integer part accumulated so far
          sum_f += static_cast<double>(sum_i);
          sum_i = 0;
        }
        return;
      }
      // min / max
      if (extreme.is_null()) {
        extreme = v;
      } else {
        int c = v.compare(extreme);
        if ((fn == "min" && c < 0) || (fn == "max" && c > 0)) extreme = v;
      }
    }

    value result(const std::string& fn) const {
      if (fn == "count") return value::i64(count);
      if (!seen) return value::null();
      if (fn == "sum") {
        return as_float ? value::f64(sum_f + static_cast<double>(sum_i))
                        : value::i64(sum_i);
      }
      if (fn == "avg") {
        double total = sum_f + static_cast<double>(sum_i);
        return value::f64(total / static_cast<double>(count));
      }
      return extreme;  // min / max
    }
  };

  struct group {
    std::vector<value> key_vals;
    std::vector<agg_state> states;
  };

  void drain() {
    grouped_ = true;
    for (;;) {
      ctx_->cancel.check();
      auto r = child_->next();
      if (!r) break;
      std::vector<value> kv;
      kv.reserve(keys_.size());
      for (const auto& k : keys_) kv.push_back(eval_expr(*k, *r, ctx_->env));

      size_t h = 1469598103934665603ull;
      for (const auto& v : kv) h = (h ^ v.hash()) * 1099511628211ull;

      group* g = nullptr;
      auto [lo, hi] = index_.equal_range(h);
      for (auto it = lo; it != hi; ++it) {
        group& cand = groups_[it->second];
        bool same = true;
        for (size_t i = 0; i < kv.size(); ++i) {
          // GROUP BY treats NULLs as one group, unlike join keys
          if (!cand.key_vals[i].equals_null_safe(kv[i])) {
            same = false;
            break;
          }
        }
        if (same) {
          g = &cand;
          break;
        }
      }
      if (!g) {
        if (static_cast<int64_t>(groups_.size()) >= k_max_buffered_rows) {
          raise(errc::resource_exceeded, "group count exceeds " +
                                             std::to_string(k_max_buffered_rows));
        }
        index_.emplace(h, groups_.size());
        groups_.push_back(group{std::move(kv), std::vector<agg_state>(aggs_.size())});
        g = &groups_.back();
        ctx_->stats->buffer_delta(+1);
      }
      for (size_t j = 0; j < aggs_.size(); ++j) {
        if (!aggs_[j].arg) {
          ++g->states[j].count;  // COUNT(*): no cell is ever forced
        } else {
          g->states[j].add(aggs_[j].fn, eval_expr(*aggs_[j].arg, *r, ctx_->env));
        }
      }
    }
    // aggregates without GROUP BY produce exactly one row, even on empty input
    if (keys_.empty() && groups_.empty()) {
      groups_.push_back(group{{}, std::vector<agg_state>(aggs_.size())});
      ctx_->stats->buffer_delta(+1);
    }
  }

  op_ptr child_;
  exec_ctx* ctx_;
  std::vector<bexpr_ptr> keys_;
  std::vector<agg_spec> aggs_;
  bool grouped_ = false;
  std::vector<group> groups_;
  std::unordered_multimap<size_t, size_t> index_;
  size_t at_ = 0;
};

// ---- compilation ----

inline op_ptr compile_node(const plan_ptr& n, exec_ctx* ctx, const param_map& params,
                           int64_t demand) {
  switch (n->k) {
    case plan_kind::scan:
      return std::make_unique<scan_op>(*n, ctx, params);
    case plan_kind::filter: {
      auto child = compile_node(n->child, ctx, params, -1);
      if (n->pred->has_async) {
        return std::make_unique<filter_async_op>(std::move(child), n->pred, ctx);
      }
      return std::make_unique<filter_sync_op>(std::move(child), n->pred, ctx);
    }
    case plan_kind::project: {
      auto child = compile_node(n->child, ctx, params, demand);
      bool any_async = false;
      for (const auto& e : n->exprs) any_async = any_async || e->has_async;
      if (any_async) {
        return std::make_unique<project_async_op>(std::move(child), n->exprs, ctx, demand);
      }
      return std::make_unique<project_sync_op>(std::move(child), n->exprs, ctx);
    }
    case plan_kind::join: {
      auto l = compile_node(n->child, ctx, params, -1);
      auto r = compile_node(n->right, ctx, params, -1);
      return std::make_unique<join_op>(std::move(l), std::move(r), *n, ctx);
    }
    case plan_kind::sort: {
      auto child = compile_node(n->child, ctx, params, -1);
      return std::make_unique<sort_op>(std::move(child), *n, ctx);
    }
    case plan_kind::group: {
      auto child = compile_node(n->child, ctx, params, -1);
      return std::make_unique<group_op>(std::move(child), *n, ctx);
    }
    case plan_kind::limit: {
      auto child = compile_node(n->child, ctx, params, n->limit);
      return std::make_unique<limit_op>(std::move(child), n->limit);
    }
  }
  raise(errc::bind_error, "unsupported plan node");
}

// ---- query handle ----

// One running query: pull rows with next_row(), or collect() them all.
// cancel() is safe from any thread; after it lands the stream terminates with
// a Cancelled error and no new thunk starts.
class query_handle {
 public:
  query_handle(logical_plan plan, param_map params, error_mode mode,
               io::fetch_log_ptr log)
      : plan_(std::move(plan)), params_(std::move(params)), log_(std::move(log)) {
    if (log_) log_base_ = log_->total_bytes();
    env_.stats = &stats_;
    env_.params = &params_;
    env_.mode = mode;
    ctx_.stats = &stats_;
    ctx_.env = env_;
    ctx_.cancel = token_;
    ctx_.pool = &pool_;
    root_ = compile_node(plan_.root, &ctx_, params_, -1);
  }

  ~query_handle() {
    token_.cancel();  // queued-but-unstarted thunks skip; shutdown joins the rest
    pool_.shutdown();
  }

  const std::vector<std::string>& columns() const { return plan_.columns; }
  logical_plan::path_kind path() const { return plan_.path; }

  std::optional<std::vector<value>> next_row() {
    if (done_) return std::nullopt;
    token_.check();
    auto r = root_->next();
    if (!r) {
      done_ = true;
      refresh_bytes();
      return std::nullopt;
    }
    std::vector<value> out;
    out.reserve(r->size());
    for (auto& c : *r) out.push_back(c->force());
    stats_.count_row_emitted();
    return out;
  }

  std::vector<std::vector<value>> collect() {
    std::vector<std::vector<value>> rows;
    while (auto r = next_row()) rows.push_back(std::move(*r));
    return rows;
  }

  void cancel() { token_.cancel(); }
  bool cancelled() const { return token_.cancelled(); }

  const exec_stats& stats() {
    refresh_bytes();
    return stats_;
  }

  nlohmann::json stats_json() {
    refresh_bytes();
    nlohmann::json j = stats_.to_json();
    j["path"] = path_name(plan_.path);
    return j;
  }

 private:
  void refresh_bytes() {
    if (log_) stats_.set_bytes_fetched(log_->total_bytes() - log_base_);
  }

  logical_plan plan_;
  param_map params_;
  io::fetch_log_ptr log_;
  uint64_t log_base_ = 0;
  exec_stats stats_;
  cancel_token token_;
  eval_env env_;
  exec_ctx ctx_;
  op_ptr root_;
  bool done_ = false;
  util::thread_pool pool_;  // destroyed first: joins workers before cells/stats die
};

}  // namespace rill::engine
