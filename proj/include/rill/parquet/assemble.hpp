#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rill/common.hpp"
#include "rill/parquet/page.hpp"
#include "rill/parquet/schema.hpp"
#include "rill/value.hpp"

namespace rill::parquet {

// Reassembles records for one top-level column from its decoded leaf chunks,
// driving per-leaf cursors through the definition/repetition level streams.
class column_assembler {
 public:
  // `by_leaf` is indexed by schema_tree leaf_index; entries for leaves outside
  // `top` may be null.
  column_assembler(const schema_node& top,
                   const std::vector<const decoded_column*>& by_leaf)
      : top_(top) {
    collect_leaves(top);
    cursors_.resize(leaves_.size());
    for (size_t k = 0; k < leaves_.size(); ++k) {
      int idx = leaves_[k]->leaf_index;
      if (idx < 0 || static_cast<size_t>(idx) >= by_leaf.size() || !by_leaf[idx]) {
        raise(errc::level_mismatch, "missing decoded chunk for leaf " +
                                        leaves_[k]->dotted_path);
      }
      cursors_[k].col = by_leaf[idx];
      slot_of_[leaves_[k]] = k;
    }
  }

  std::vector<value> assemble(int64_t num_rows) {
    std::vector<value> out;
    out.reserve(static_cast<size_t>(num_rows));
    for (int64_t r = 0; r < num_rows; ++r) {
      if (!has_next(top_)) {
        raise(errc::level_mismatch,
              "column " + top_.name + ": ran out of level data at record " +
                  std::to_string(r));
      }
      if (peek_rep(top_) != 0) {
        raise(errc::level_mismatch,
              "column " + top_.name + ": record does not start at repetition 0");
      }
      out.push_back(assemble_field(top_));
    }
    for (size_t k = 0; k < cursors_.size(); ++k) {
      const auto& c = cursors_[k];
      if (c.i != c.col->entry_count() || c.vi != c.col->values.size()) {
        raise(errc::level_mismatch,
              "column " + top_.name + ": leftover level data after " +
                  std::to_string(num_rows) + " records");
      }
    }
    return out;
  }

 private:
  struct cursor {
    const decoded_column* col = nullptr;
    size_t i = 0;   // level slot
    size_t vi = 0;  // value index
  };

  void collect_leaves(const schema_node& n) {
    if (n.is_leaf()) {
      leaves_.push_back(&n);
      return;
    }
    for (const auto& c : n.children) collect_leaves(c);
  }

  const schema_node* first_leaf(const schema_node& n) const {
    const schema_node* p = &n;
    while (!p->is_leaf()) p = &p->children.front();
    return p;
  }

  cursor& cursor_of(const schema_node& leaf) { return cursors_[slot_of_.at(&leaf)]; }

  bool has_next(const schema_node& n) {
    const cursor& c = cursor_of(*first_leaf(n));
    return c.i < c.col->entry_count();
  }

  uint16_t peek_def(const schema_node& n) {
    const cursor& c = cursor_of(*first_leaf(n));
    return c.col->def_at(c.i);
  }

  uint16_t peek_rep(const schema_node& n) {
    const cursor& c = cursor_of(*first_leaf(n));
    return c.col->rep_at(c.i);
  }

  // Consume one slot at every leaf under `n` (a null or empty list occupies
  // exactly one slot per descendant leaf).
  void advance_slot(const schema_node& n) {
    if (n.is_leaf()) {
      ++cursor_of(n).i;
      return;
    }
    for (const auto& c : n.children) advance_slot(c);
  }

  value consume_value(const schema_node& leaf) {
    cursor& c = cursor_of(leaf);
    if (c.col->def_at(c.i) != leaf.max_def) {
      raise(errc::level_mismatch, "column " + top_.name + ": misaligned value slot");
    }
    if (c.vi >= c.col->values.size()) {
      raise(errc::level_mismatch, "column " + top_.name + ": value stream exhausted");
    }
    ++c.i;
    return c.col->values[c.vi++];
  }

  value assemble_field(const schema_node& n) {
    if (n.rep == repetition::repeated) return assemble_list(n, false);
    if (n.rep == repetition::optional && peek_def(n) < n.max_def) {
      advance_slot(n);
      return value::null();
    }
    return assemble_present(n);
  }

  value assemble_present(const schema_node& n) {
    if (n.is_leaf()) return consume_value(n);
    if (n.is_list_annotated() && n.children.size() == 1 &&
        n.children[0].rep == repetition::repeated) {
      return assemble_list(n.children[0], true);
    }
    std::vector<std::pair<std::string, value>> fields;
    fields.reserve(n.children.size());
    for (const auto& c : n.children) fields.emplace_back(c.name, assemble_field(c));
    return value::strct(std::move(fields));
  }

  value assemble_list(const schema_node& r, bool annotated) {
    if (peek_def(r) < r.max_def) {
      advance_slot(r);
      return value::list({});
    }
    std::vector<value> elems;
    while (true) {
      elems.push_back(assemble_element(r, annotated));
      if (!has_next(r) || peek_rep(r) != r.max_rep) break;
    }
    return value::list(std::move(elems));
  }

  value assemble_element(const schema_node& r, bool annotated) {
    if (r.is_leaf()) return consume_value(r);
    bool wrapper = annotated && r.children.size() == 1 && r.name != "array" &&
                   !ends_with(r.name, "_tuple");
    if (wrapper) return assemble_field(r.children[0]);
    std::vector<std::pair<std::string, value>> fields;
    fields.reserve(r.children.size());
    for (const auto& c : r.children) fields.emplace_back(c.name, assemble_field(c));
    return value::strct(std::move(fields));
  }

  static bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  }

  const schema_node& top_;
  std::vector<const schema_node*> leaves_;
  std::vector<cursor> cursors_;
  std::map<const schema_node*, size_t> slot_of_;
};

}  // namespace rill::parquet
