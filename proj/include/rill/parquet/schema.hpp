#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rill/common.hpp"
#include "rill/parquet/format.hpp"

namespace rill::parquet {

// Schema tree with per-node max definition/repetition levels: each
// optional or repeated ancestor adds a definition level, each repeated
// ancestor adds a repetition level.
struct schema_node {
  std::string name;
  repetition rep = repetition::required;
  std::optional<physical_type> ptype;  // set iff leaf
  int32_t type_length = 0;
  logical_type logical;
  std::vector<schema_node> children;

  int max_def = 0;
  int max_rep = 0;
  std::string dotted_path;  // from root, excluding the root itself
  int leaf_index = -1;      // dense index over leaves in schema order
  bool raw_surfaced = false;  // physical value surfaced as-is (exotic logical type)

  bool is_leaf() const { return ptype.has_value(); }
  bool is_list_annotated() const { return logical.kind == logical_kind::list; }
};

class schema_tree {
 public:
  schema_node root;
  std::vector<const schema_node*> leaves;  // schema order; stable after build

  const schema_node* find_leaf(std::string_view dotted) const {
    for (const auto* l : leaves) {
      if (l->dotted_path == dotted) return l;
    }
    return nullptr;
  }

  // Leaves under a root-level column name (single leaf for flat columns).
  std::vector<const schema_node*> leaves_under(std::string_view column) const {
    std::vector<const schema_node*> out;
    for (const auto* l : leaves) {
      std::string_view p = l->dotted_path;
      if (p == column ||
          (p.size() > column.size() && p.substr(0, column.size()) == column &&
           p[column.size()] == '.')) {
        out.push_back(l);
      }
    }
    return out;
  }
};

namespace detail {

inline void build_node(const std::vector<schema_element>& elems, size_t& pos,
                       schema_node& node, int def, int rep, const std::string& prefix,
                       int& next_leaf) {
  if (pos >= elems.size()) raise(errc::footer_corrupt, "schema: truncated element list");
  const schema_element& el = elems[pos++];
  node.name = el.name;
  node.rep = el.repetition_type.value_or(repetition::required);
  node.logical = el.logical;
  node.type_length = el.type_length;
  if (node.rep != repetition::required) ++def;
  if (node.rep == repetition::repeated) ++rep;
  node.max_def = def;
  node.max_rep = rep;
  node.dotted_path = prefix.empty() ? el.name : prefix + "." + el.name;
  if (el.num_children == 0) {
    if (!el.type) raise(errc::footer_corrupt, "schema: leaf without physical type");
    node.ptype = el.type;
    node.leaf_index = next_leaf++;
    switch (node.logical.kind) {
      case logical_kind::none:
      case logical_kind::string:
      case logical_kind::date:
      case logical_kind::timestamp_millis:
      case logical_kind::timestamp_micros:
      case logical_kind::integer:
      case logical_kind::json:
      case logical_kind::enumeration:
        break;
      case logical_kind::decimal:
        // int-backed decimals decode exactly; others surface raw
        node.raw_surfaced = *el.type != physical_type::int32 &&
                            *el.type != physical_type::int64;
        break;
      default:
        node.raw_surfaced = true;
        break;
    }
    return;
  }
  node.children.resize(el.num_children);
  for (auto& child : node.children) {
    build_node(elems, pos, child, def, rep, node.dotted_path, next_leaf);
  }
}

inline void collect_leaves(const schema_node& node, std::vector<const schema_node*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}

}  // namespace detail

inline std::shared_ptr<schema_tree> build_schema_tree(
    const std::vector<schema_element>& elems) {
  if (elems.empty()) raise(errc::footer_corrupt, "schema: empty");
  auto tree = std::make_shared<schema_tree>();
  const schema_element& root_el = elems[0];
  tree->root.name = root_el.name;
  tree->root.rep = repetition::required;
  if (root_el.num_children < 1) {
    raise(errc::footer_corrupt, "schema: root has no children");
  }
  tree->root.children.resize(root_el.num_children);
  size_t pos = 1;
  int next_leaf = 0;
  for (auto& child : tree->root.children) {
    detail::build_node(elems, pos, child, 0, 0, "", next_leaf);
  }
  if (pos != elems.size()) {
    raise(errc::footer_corrupt, "schema: element count mismatch");
  }
  detail::collect_leaves(tree->root, tree->leaves);
  return tree;
}

}  // namespace rill::parquet
