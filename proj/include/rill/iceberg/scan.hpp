#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rill/common.hpp"
#include "rill/iceberg/avro.hpp"
#include "rill/iceberg/metadata.hpp"
#include "rill/io/open.hpp"
#include "rill/parquet/file.hpp"

namespace rill::iceberg {

// manifest entry status
inline constexpr int64_t k_status_existing = 0;
inline constexpr int64_t k_status_added = 1;
inline constexpr int64_t k_status_deleted = 2;

// data_file content
inline constexpr int64_t k_content_data = 0;
inline constexpr int64_t k_content_position_deletes = 1;
inline constexpr int64_t k_content_equality_deletes = 2;

// reserved field id of the file_path column in position-delete files
inline constexpr int64_t k_pos_delete_path_id = 2147483546;

struct delete_file_info {
  int content = 0;  // position or equality
  std::string path;          // resolved, openable
  std::string logical_path;  // as recorded in the manifest
  int64_t data_sequence_number = 0;
  int64_t record_count = 0;
  std::vector<int> equality_ids;
  // When the manifest's file_path bounds pin the delete to one data file,
  // it pairs with that file alone.
  std::optional<std::string> referenced_path;
};

struct data_file_info {
  std::string path;          // resolved, openable
  std::string logical_path;  // as recorded in the manifest
  int64_t data_sequence_number = 0;
  int64_t record_count = 0;
  value::struct_t partition;
  std::vector<delete_file_info> deletes;  // ordered by (sequence, path)
};

struct scan_plan {
  int64_t snapshot_id = 0;
  table_schema schema;
  std::vector<data_file_info> files;  // manifest order, then entry order
};

namespace detail {

inline byte_buffer read_whole(const io::source_opener& open,
                              const std::string& uri, io::fetch_purpose purpose) {
  auto src = open(uri);
  return src->read_range({0, src->length()}, purpose);
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Column bound from a data_file's lower_bounds/upper_bounds, serialized as an
// array of {key: field id, value: bytes} pairs.
inline std::optional<std::string> bound_for(const value& df, std::string_view which,
                                            int64_t field_id) {
  const value* m = field(df, which);
  if (!m || m->type() != value::kind::list) return std::nullopt;
  for (const value& kv : m->as_list()) {
    if (kv.type() != value::kind::strct) continue;
    const value* k = field(kv, "key");
    const value* v = field(kv, "value");
    if (k && v && !k->is_null() && !v->is_null() && k->as_i64() == field_id) {
      return v->as_str();
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Read the manifest list and every live manifest, and pair each data file with
// the delete files that apply to it. Position deletes apply at the same
// sequence number (they may target rows added in their own commit); equality
// deletes only apply to strictly older data.
inline scan_plan plan_scan(const table_metadata& meta, const snapshot_info& snap,
                           const io::source_opener& open) {
  scan_plan plan;
  plan.snapshot_id = snap.snapshot_id;
  plan.schema = meta.schema_for(snap);

  struct manifest_ref {
    std::string path;
    int64_t content = 0;
    int64_t sequence_number = 0;
  };
  std::vector<manifest_ref> manifests;
  {
    avro_file list = read_avro(detail::read_whole(
        open, meta.resolve_path(snap.manifest_list), io::fetch_purpose::manifest_list));
    for (const value& rec : list.records) {
      manifest_ref m;
      m.path = meta.resolve_path(field_str(rec, "manifest_path"));
      m.content = field_i64(rec, "content", 0);
      m.sequence_number = field_i64(rec, "sequence_number", 0);
      manifests.push_back(std::move(m));
    }
  }

  std::vector<data_file_info> datas;
  std::vector<delete_file_info> deletes;
  for (const auto& m : manifests) {
    avro_file mf =
        read_avro(detail::read_whole(open, m.path, io::fetch_purpose::manifest));
    for (const value& entry : mf.records) {
      int64_t status = field_i64(entry, "status", k_status_existing);
      if (status == k_status_deleted) continue;

      int64_t seq;
      if (const value* sv = field(entry, "sequence_number"); sv && !sv->is_null()) {
        seq = sv->as_i64();
      } else if (status == k_status_added) {
        seq = m.sequence_number;  // inherited from the manifest-list entry
      } else {
        raise(errc::manifest_corrupt,
              m.path + ": existing entry without a sequence number");
      }

      const value* df = field(entry, "data_file");
      if (!df || df->type() != value::kind::strct) {
        raise(errc::manifest_corrupt, m.path + ": entry missing data_file");
      }
      std::string format = field_str(*df, "file_format");
      if (detail::upper(format) != "PARQUET") {
        raise(errc::unsupported_feature, "data file format " + format);
      }
      std::string logical = field_str(*df, "file_path");
      int64_t content = field_i64(*df, "content", 0);

      if (content == k_content_data) {
        data_file_info f;
        f.logical_path = logical;
        f.path = meta.resolve_path(logical);
        f.data_sequence_number = seq;
        f.record_count = field_i64(*df, "record_count", 0);
        if (const value* part = field(*df, "partition");
            part && part->type() == value::kind::strct) {
          f.partition = part->as_struct();
        }
        datas.push_back(std::move(f));
      } else if (content == k_content_position_deletes ||
                 content == k_content_equality_deletes) {
        delete_file_info d;
        d.content = static_cast<int>(content);
        d.logical_path = logical;
        d.path = meta.resolve_path(logical);
        d.data_sequence_number = seq;
        d.record_count = field_i64(*df, "record_count", 0);
        if (const value* ids = field(*df, "equality_ids");
            ids && ids->type() == value::kind::list) {
          for (const value& idv : ids->as_list()) {
            d.equality_ids.push_back(static_cast<int>(idv.as_i64()));
          }
        }
        if (d.content == k_content_equality_deletes && d.equality_ids.empty()) {
          raise(errc::manifest_corrupt,
                d.logical_path + ": equality delete without equality_ids");
        }
        if (d.content == k_content_position_deletes) {
          auto lo = detail::bound_for(*df, "lower_bounds", k_pos_delete_path_id);
          auto hi = detail::bound_for(*df, "upper_bounds", k_pos_delete_path_id);
          if (lo && hi && *lo == *hi) d.referenced_path = *lo;
        }
        deletes.push_back(std::move(d));
      } else {
        raise(errc::manifest_corrupt,
              m.path + ": unknown data_file content " + std::to_string(content));
      }
    }
  }

  std::sort(deletes.begin(), deletes.end(), [](const auto& a, const auto& b) {
    if (a.data_sequence_number != b.data_sequence_number) {
      return a.data_sequence_number < b.data_sequence_number;
    }
    return a.logical_path < b.logical_path;
  });
  for (auto& f : datas) {
    for (const auto& d : deletes) {
      if (d.referenced_path && *d.referenced_path != f.logical_path) continue;
      bool applies = d.content == k_content_position_deletes
                         ? d.data_sequence_number >= f.data_sequence_number
                         : d.data_sequence_number > f.data_sequence_number;
      if (applies) f.deletes.push_back(d);
    }
  }
  plan.files = std::move(datas);
  return plan;
}

// Delete content for one data file, loaded into memory and ready to test
// rows against.
struct loaded_deletes {
  std::set<int64_t> positions;  // row indexes within the data file to drop
  struct eq_set {
    std::vector<std::string> columns;
    std::vector<std::vector<value>> tuples;
  };
  std::vector<eq_set> equality;

  bool empty() const { return positions.empty() && equality.empty(); }
};

namespace detail {

// Open a delete parquet file; every fetch it makes is logged as delete_file.
inline std::vector<std::vector<value>> read_delete_rows(
    const delete_file_info& d, const std::vector<std::string>& columns,
    const io::source_opener& open, const parquet::parquet_options& popt) {
  auto src = std::make_shared<io::purpose_override_source>(
      open(d.path), io::fetch_purpose::delete_file);
  try {
    parquet::parquet_file pf(src, popt);
    return pf.read_rows(columns);
  } catch (const error& e) {
    if (e.code() == errc::transport || e.code() == errc::range_out_of_bounds ||
        e.code() == errc::cancelled) {
      throw;
    }
    raise(errc::delete_file_corrupt, d.logical_path + ": " + e.what());
  }
}

}  // namespace detail

inline loaded_deletes load_deletes(const data_file_info& f,
                                   const table_schema& schema,
                                   const io::source_opener& open,
                                   const parquet::parquet_options& popt = {}) {
  loaded_deletes out;
  for (const auto& d : f.deletes) {
    if (d.content == k_content_position_deletes) {
      auto rows = detail::read_delete_rows(d, {"file_path", "pos"}, open, popt);
      for (const auto& row : rows) {
        if (row[0].is_null() || row[1].is_null()) {
          raise(errc::delete_file_corrupt,
                d.logical_path + ": null file_path or pos");
        }
        const std::string& fp = row[0].as_str();
        if (fp == f.logical_path || fp == f.path) out.positions.insert(row[1].as_i64());
      }
    } else {
      loaded_deletes::eq_set eq;
      for (int id : d.equality_ids) {
        const schema_field* sf = schema.find_by_id(id);
        if (!sf) {
          raise(errc::delete_file_corrupt,
                d.logical_path + ": equality id " + std::to_string(id) +
                    " not in table schema");
        }
        eq.columns.push_back(sf->name);
      }
      eq.tuples = detail::read_delete_rows(d, eq.columns, open, popt);
      if (!eq.tuples.empty()) out.equality.push_back(std::move(eq));
    }
  }
  return out;
}

// A row survives iff its position is absent from every applicable position
// delete and its equality-field projection matches no equality-delete row
// (null-safe: null matches null).
inline bool row_deleted(const loaded_deletes& del, int64_t position,
                        const std::vector<std::string>& columns,
                        const std::vector<value>& row) {
  if (del.positions.count(position)) return true;
  for (const auto& eq : del.equality) {
    std::vector<const value*> projected;
    projected.reserve(eq.columns.size());
    static const value null_value;
    for (const auto& name : eq.columns) {
      auto it = std::find(columns.begin(), columns.end(), name);
      projected.push_back(it == columns.end() ? &null_value
                                              : &row[it - columns.begin()]);
    }
    for (const auto& tuple : eq.tuples) {
      bool match = true;
      for (size_t i = 0; i < tuple.size(); ++i) {
        if (!projected[i]->equals_null_safe(tuple[i])) {
          match = false;
          break;
        }
      }
      if (match) return true;
    }
  }
  return false;
}

// Read one data file and drop deleted rows. Output columns follow the table
// schema; columns absent from the file (schema evolution) read as null.
inline std::vector<std::vector<value>> scan_data_file(
    const data_file_info& f, const table_schema& schema,
    const io::source_opener& open, const parquet::parquet_options& popt = {}) {
  auto src = open(f.path);
  parquet::parquet_file pf(src, popt);

  std::vector<std::string> present = pf.column_names();
  auto has = [&](const std::string& n) {
    return std::find(present.begin(), present.end(), n) != present.end();
  };
  std::vector<std::string> read_cols;
  for (const auto& sf : schema.fields) {
    if (has(sf.name)) read_cols.push_back(sf.name);
  }
  std::vector<std::vector<value>> raw = pf.read_rows(read_cols);

  loaded_deletes del = load_deletes(f, schema, open, popt);
  std::vector<std::vector<value>> out;
  out.reserve(raw.size());
  for (size_t pos = 0; pos < raw.size(); ++pos) {
    if (row_deleted(del, static_cast<int64_t>(pos), read_cols, raw[pos])) continue;
    std::vector<value> row;
    row.reserve(schema.fields.size());
    size_t j = 0;
    for (const auto& sf : schema.fields) {
      if (j < read_cols.size() && read_cols[j] == sf.name) {
        row.push_back(std::move(raw[pos][j]));
        ++j;
      } else {
        row.push_back(value::null());
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

struct scan_result {
  table_schema schema;
  std::vector<std::string> columns;  // schema field order
  std::vector<std::vector<value>> rows;
};

// resolve -> plan -> read -> apply deletes, for a whole snapshot.
inline scan_result scan_table(const table_metadata& meta, const snapshot_info& snap,
                              const io::source_opener& open,
                              const parquet::parquet_options& popt = {}) {
  scan_plan plan = plan_scan(meta, snap, open);
  scan_result out;
  out.schema = plan.schema;
  for (const auto& sf : plan.schema.fields) out.columns.push_back(sf.name);
  for (const auto& f : plan.files) {
    auto rows = scan_data_file(f, plan.schema, open, popt);
    out.rows.insert(out.rows.end(), std::make_move_iterator(rows.begin()),
                    std::make_move_iterator(rows.end()));
  }
  return out;
}

}  // namespace rill::iceberg
