#pragma once

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rill/common.hpp"
#include "rill/io/source.hpp"
#include "rill/parquet/assemble.hpp"
#include "rill/parquet/format.hpp"
#include "rill/parquet/page.hpp"
#include "rill/parquet/schema.hpp"
#include "rill/value.hpp"

namespace rill::parquet {

enum class cmp_op { eq, lt, le, gt, ge };

inline const char* cmp_op_name(cmp_op op) {
  switch (op) {
    case cmp_op::eq: return "=";
    case cmp_op::lt: return "<";
    case cmp_op::le: return "<=";
    case cmp_op::gt: return ">";
    case cmp_op::ge: return ">=";
  }
  return "?";
}

// column <op> literal, for row-group pruning against footer statistics.
struct stats_predicate {
  std::string column;  // top-level name or dotted leaf path
  cmp_op op;
  value literal;
};

struct parquet_options {
  uint64_t tail_hint = io::k_default_tail_hint;
};

class parquet_file {
 public:
  explicit parquet_file(std::shared_ptr<io::data_source> source,
                        parquet_options options = {})
      : source_(std::move(source)), options_(options) {}

  const file_metadata_raw& footer() {
    ensure_footer();
    return *meta_;
  }

  const schema_tree& schema() {
    ensure_footer();
    return *tree_;
  }

  int64_t num_rows() { return footer().num_rows; }
  size_t num_row_groups() { return footer().row_groups.size(); }
  const std::string& url() const { return source_->url(); }

  // Row groups that may contain rows matching every predicate. Keeps a group
  // unless footer statistics prove it cannot match (missing or unusable
  // statistics always keep).
  std::vector<size_t> prune_row_groups(const std::vector<stats_predicate>& preds) {
    ensure_footer();
    std::vector<size_t> keep;
    for (size_t g = 0; g < meta_->row_groups.size(); ++g) {
      bool kept = true;
      for (const auto& p : preds) {
        if (group_cannot_match(g, p)) {
          kept = false;
          break;
        }
      }
      if (kept) keep.push_back(g);
    }
    return keep;
  }

  // Decoded chunk for one leaf of one row group: exactly one ranged read per
  // distinct (group, leaf), memoized for the file handle's lifetime.
  std::shared_ptr<const decoded_column> read_leaf_chunk(size_t group,
                                                        const schema_node& leaf) {
    ensure_footer();
    if (group >= meta_->row_groups.size()) {
      raise(errc::range_out_of_bounds, "row group index " + std::to_string(group));
    }
    std::pair<size_t, int> key{group, leaf.leaf_index};
    {
      std::lock_guard<std::mutex> hold(mu_);
      auto it = chunk_cache_.find(key);
      if (it != chunk_cache_.end()) return it->second;
    }
    const auto& rg = meta_->row_groups[group];
    if (leaf.leaf_index < 0 ||
        static_cast<size_t>(leaf.leaf_index) >= rg.columns.size()) {
      raise(errc::footer_corrupt, "row group missing chunk for " + leaf.dotted_path);
    }
    const auto& chunk = rg.columns[static_cast<size_t>(leaf.leaf_index)];
    if (chunk.num_values == 0) {
      auto empty = std::make_shared<decoded_column>();
      empty->max_def = leaf.max_def;
      empty->max_rep = leaf.max_rep;
      std::lock_guard<std::mutex> hold(mu_);
      auto [it, inserted] = chunk_cache_.emplace(key, std::move(empty));
      return it->second;
    }
    io::byte_range range = chunk.pages_range();
    if (range.offset + range.length > source_->length()) {
      raise(errc::footer_corrupt, "column chunk extends past file end");
    }
    byte_buffer bytes = source_->read_range(range, io::fetch_purpose::column_chunk);
    auto decoded = std::make_shared<decoded_column>(
        decode_column_chunk(bytes, chunk, leaf));
    std::lock_guard<std::mutex> hold(mu_);
    auto [it, inserted] = chunk_cache_.emplace(key, std::move(decoded));
    return it->second;
  }

  // One top-level column for the given row groups (all groups when empty),
  // assembled into one value per record.
  std::vector<value> read_column(const std::string& name,
                                 const std::vector<size_t>* groups = nullptr) {
    ensure_footer();
    const schema_node& top = top_level(name);
    std::vector<value> out;
    auto run = [&](size_t g) {
      auto vals = assemble_group_column(g, top);
      out.insert(out.end(), std::make_move_iterator(vals.begin()),
                 std::make_move_iterator(vals.end()));
    };
    if (groups) {
      for (size_t g : *groups) run(g);
    } else {
      for (size_t g = 0; g < meta_->row_groups.size(); ++g) run(g);
    }
    return out;
  }

  // Rows across the given row groups, one vector<value> per record, columns in
  // the requested order (all top-level columns when `columns` is empty).
  std::vector<std::vector<value>> read_rows(
      const std::vector<std::string>& columns = {},
      const std::vector<size_t>* groups = nullptr) {
    ensure_footer();
    std::vector<const schema_node*> tops;
    if (columns.empty()) {
      for (const auto& c : tree_->root.children) tops.push_back(&c);
    } else {
      for (const auto& name : columns) tops.push_back(&top_level(name));
    }
    std::vector<std::vector<value>> rows;
    auto run = [&](size_t g) {
      int64_t n = meta_->row_groups[g].num_rows;
      std::vector<std::vector<value>> cols;
      cols.reserve(tops.size());
      for (const schema_node* t : tops) cols.push_back(assemble_group_column(g, *t));
      size_t base = rows.size();
      rows.resize(base + static_cast<size_t>(n));
      for (size_t r = 0; r < static_cast<size_t>(n); ++r) {
        rows[base + r].reserve(tops.size());
        for (auto& col : cols) rows[base + r].push_back(std::move(col[r]));
      }
    };
    if (groups) {
      for (size_t g : *groups) run(g);
    } else {
      for (size_t g = 0; g < meta_->row_groups.size(); ++g) run(g);
    }
    return rows;
  }

  std::vector<std::string> column_names() {
    ensure_footer();
    std::vector<std::string> names;
    for (const auto& c : tree_->root.children) names.push_back(c.name);
    return names;
  }

  const schema_node& top_level(const std::string& name) {
    ensure_footer();
    for (const auto& c : tree_->root.children) {
      if (c.name == name) return c;
    }
    raise(errc::unknown_column, "no such column: " + name);
  }

 private:
  void ensure_footer() {
    std::lock_guard<std::mutex> hold(footer_mu_);
    if (meta_) return;
    auto [tail, file_len] = source_->read_tail(options_.tail_hint);
    if (file_len == 0) raise(errc::empty_file, source_->url());
    if (file_len < 8 || tail.size() < 8) {
      raise(errc::not_parquet, "file too small for a footer");
    }
    std::string magic = tail.substr(tail.size() - 4);
    if (magic == "PARE") {
      raise(errc::unsupported_feature, "encrypted parquet file");
    }
    if (magic != "PAR1") raise(errc::not_parquet, "bad trailing magic");
    uint32_t footer_len;
    std::memcpy(&footer_len, tail.data() + tail.size() - 8, 4);
    if (static_cast<uint64_t>(footer_len) + 8 > file_len) {
      raise(errc::footer_corrupt, "footer length exceeds file size");
    }
    uint64_t footer_start = file_len - 8 - footer_len;
    uint64_t tail_start = file_len - tail.size();
    byte_buffer footer_bytes;
    if (footer_start >= tail_start) {
      footer_bytes = tail.substr(footer_start - tail_start, footer_len);
    } else {
      // Tail hint fell short: one more read for the full footer span.
      footer_bytes = source_->read_range({footer_start, footer_len},
                                         io::fetch_purpose::footer);
    }
    auto meta = std::make_unique<file_metadata_raw>(decode_file_metadata(footer_bytes));
    auto tree = build_schema_tree(meta->schema);
    for (const auto& rg : meta->row_groups) {
      if (rg.columns.size() != tree->leaves.size()) {
        raise(errc::footer_corrupt, "row group chunk count != leaf count");
      }
    }
    meta_ = std::move(meta);
    tree_ = std::move(tree);
  }

  std::vector<value> assemble_group_column(size_t group, const schema_node& top) {
    std::vector<std::shared_ptr<const decoded_column>> hold;
    std::vector<const decoded_column*> by_leaf(tree_->leaves.size(), nullptr);
    collect_chunks(group, top, hold, by_leaf);
    column_assembler assembler(top, by_leaf);
    return assembler.assemble(meta_->row_groups[group].num_rows);
  }

  void collect_chunks(size_t group, const schema_node& n,
                      std::vector<std::shared_ptr<const decoded_column>>& hold,
                      std::vector<const decoded_column*>& by_leaf) {
    if (n.is_leaf()) {
      auto chunk = read_leaf_chunk(group, n);
      by_leaf[static_cast<size_t>(n.leaf_index)] = chunk.get();
      hold.push_back(std::move(chunk));
      return;
    }
    for (const auto& c : n.children) collect_chunks(group, c, hold, by_leaf);
  }

  // True only when statistics prove no row of `group` satisfies `p`.
  bool group_cannot_match(size_t group, const stats_predicate& p) {
    const schema_node* leaf = nullptr;
    // Accept a dotted leaf path or a top-level name that is itself a leaf.
    leaf = tree_->find_leaf(p.column);
    if (!leaf) return false;  // nested/unknown: cannot prove
    if (p.literal.is_null()) return false;
    const auto& rg = meta_->row_groups[group];
    if (static_cast<size_t>(leaf->leaf_index) >= rg.columns.size()) return false;
    const auto& stats = rg.columns[static_cast<size_t>(leaf->leaf_index)].stats;
    auto min_v = decode_stat(*leaf, stats.min_value);
    auto max_v = decode_stat(*leaf, stats.max_value);
    try {
      switch (p.op) {
        case cmp_op::eq:
          return (min_v && p.literal.compare(*min_v) < 0) ||
                 (max_v && p.literal.compare(*max_v) > 0);
        case cmp_op::lt:  // need some value < literal, i.e. min < literal
          return min_v && min_v->compare(p.literal) >= 0;
        case cmp_op::le:
          return min_v && min_v->compare(p.literal) > 0;
        case cmp_op::gt:  // need some value > literal, i.e. max > literal
          return max_v && max_v->compare(p.literal) <= 0;
        case cmp_op::ge:
          return max_v && max_v->compare(p.literal) < 0;
      }
    } catch (const error&) {
      return false;  // incomparable types: cannot prove
    }
    return false;
  }

  std::optional<value> decode_stat(const schema_node& leaf,
                                   const std::optional<byte_buffer>& raw) {
    if (!raw || !leaf.ptype) return std::nullopt;
    try {
      std::vector<value> one;
      detail::plain_decoder dec(leaf);
      if (*leaf.ptype == physical_type::byte_array) {
        // Statistics store byte arrays without the length prefix.
        byte_buffer framed;
        uint32_t len = static_cast<uint32_t>(raw->size());
        framed.append(reinterpret_cast<const char*>(&len), 4);
        framed.append(*raw);
        dec.decode(framed, 1, one);
      } else {
        dec.decode(*raw, 1, one);
      }
      return one.at(0);
    } catch (const error&) {
      return std::nullopt;
    }
  }

  std::shared_ptr<io::data_source> source_;
  parquet_options options_;
  std::mutex footer_mu_;
  std::mutex mu_;
  std::unique_ptr<file_metadata_raw> meta_;
  std::shared_ptr<schema_tree> tree_;
  std::map<std::pair<size_t, int>, std::shared_ptr<const decoded_column>> chunk_cache_;
};

}  // namespace rill::parquet
