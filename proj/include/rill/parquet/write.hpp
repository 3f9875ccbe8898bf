#pragma once

#include <algorithm>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "rill/common.hpp"
#include "rill/parquet/format.hpp"
#include "rill/parquet/thrift.hpp"
#include "rill/value.hpp"

namespace rill::parquet {

using thrift::compact_writer;
using thrift::ct_binary;
using thrift::ct_i32;
using thrift::ct_struct;

// Minimal writer: flat schema, PLAIN encoding, no compression, one data page
// per chunk, chunk-level min/max statistics. Output bytes are deterministic,
// which the bench corpus and synthetic test fixtures rely on.

struct write_column {
  std::string name;
  physical_type type = physical_type::int64;
  logical_kind logical = logical_kind::none;  // string/date/timestamp_* honored
  bool nullable = false;
};

struct write_options {
  int64_t row_group_rows = 100000;
  std::string created_by = "rill";
  bool write_stats = true;
};

namespace wdetail {

inline void append_u32(byte_buffer& out, uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

inline void append_varint(byte_buffer& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

// Hybrid encoding using RLE runs only (bit width <= 8).
inline byte_buffer rle_runs(const std::vector<uint8_t>& levels) {
  byte_buffer out;
  size_t i = 0;
  while (i < levels.size()) {
    size_t j = i;
    while (j < levels.size() && levels[j] == levels[i]) ++j;
    append_varint(out, (j - i) << 1);
    out.push_back(static_cast<char>(levels[i]));
    i = j;
  }
  return out;
}

inline byte_buffer plain_one(physical_type t, const value& v) {
  byte_buffer out;
  switch (t) {
    case physical_type::int32: {
      int32_t x = static_cast<int32_t>(v.as_i64());  // i64 and date both fit
      out.append(reinterpret_cast<const char*>(&x), 4);
      return out;
    }
    case physical_type::int64: {
      int64_t x = v.as_i64();  // i64 and timestamp share storage
      out.append(reinterpret_cast<const char*>(&x), 8);
      return out;
    }
    case physical_type::dbl: {
      double x = v.as_f64();
      out.append(reinterpret_cast<const char*>(&x), 8);
      return out;
    }
    case physical_type::flt: {
      float x = static_cast<float>(v.as_f64());
      out.append(reinterpret_cast<const char*>(&x), 4);
      return out;
    }
    case physical_type::byte_array:
      return byte_buffer(v.as_str());
    default:
      raise(errc::unsupported_feature, "writer: physical type");
  }
}

inline int32_t converted_type_id(logical_kind k) {
  switch (k) {
    case logical_kind::string: return 0;     // UTF8
    case logical_kind::date: return 6;       // DATE
    case logical_kind::timestamp_millis: return 9;
    case logical_kind::timestamp_micros: return 10;
    default: return -1;
  }
}

}  // namespace wdetail

inline byte_buffer write_table(const std::vector<write_column>& cols,
                               const std::vector<std::vector<value>>& data,
                               write_options opt = {}) {
  if (cols.size() != data.size()) {
    raise(errc::type_error, "writer: column count mismatch");
  }
  int64_t num_rows = data.empty() ? 0 : static_cast<int64_t>(data[0].size());
  for (const auto& c : data) {
    if (static_cast<int64_t>(c.size()) != num_rows) {
      raise(errc::type_error, "writer: ragged columns");
    }
  }

  byte_buffer out = "PAR1";

  struct chunk_info {
    int64_t offset = 0;
    int64_t total_size = 0;
    int64_t num_values = 0;
    std::optional<byte_buffer> min_v, max_v;
    int64_t null_count = 0;
  };
  struct group_info {
    int64_t num_rows = 0;
    int64_t total_bytes = 0;
    std::vector<chunk_info> chunks;
  };
  std::vector<group_info> groups;

  for (int64_t base = 0; base < num_rows || (num_rows == 0 && base == 0);
       base += opt.row_group_rows) {
    int64_t take = std::min<int64_t>(opt.row_group_rows, num_rows - base);
    if (num_rows == 0) take = 0;
    group_info gi;
    gi.num_rows = take;
    for (size_t ci = 0; ci < cols.size(); ++ci) {
      const auto& col = cols[ci];
      chunk_info info;
      info.num_values = take;

      // page body: [def levels][plain values]
      byte_buffer body;
      if (col.nullable) {
        std::vector<uint8_t> defs(static_cast<size_t>(take));
        for (int64_t r = 0; r < take; ++r) {
          bool null = data[ci][static_cast<size_t>(base + r)].is_null();
          defs[static_cast<size_t>(r)] = null ? 0 : 1;
          info.null_count += null ? 1 : 0;
        }
        byte_buffer levels = wdetail::rle_runs(defs);
        wdetail::append_u32(body, static_cast<uint32_t>(levels.size()));
        body.append(levels);
      }
      if (col.type == physical_type::boolean) {
        byte_buffer bits;
        uint8_t cur = 0;
        int nbits = 0;
        for (int64_t r = 0; r < take; ++r) {
          const value& v = data[ci][static_cast<size_t>(base + r)];
          if (v.is_null()) continue;
          if (v.as_bool()) cur |= static_cast<uint8_t>(1u << nbits);
          if (++nbits == 8) {
            bits.push_back(static_cast<char>(cur));
            cur = 0;
            nbits = 0;
          }
        }
        if (nbits > 0) bits.push_back(static_cast<char>(cur));
        body.append(bits);
      } else {
        for (int64_t r = 0; r < take; ++r) {
          const value& v = data[ci][static_cast<size_t>(base + r)];
          if (v.is_null()) continue;
          byte_buffer one = wdetail::plain_one(col.type, v);
          if (col.type == physical_type::byte_array) {
            wdetail::append_u32(body, static_cast<uint32_t>(one.size()));
          }
          body.append(one);
        }
      }

      if (opt.write_stats && col.type != physical_type::boolean) {
        const value* mn = nullptr;
        const value* mx = nullptr;
        for (int64_t r = 0; r < take; ++r) {
          const value& v = data[ci][static_cast<size_t>(base + r)];
          if (v.is_null()) continue;
          if (!mn || v.compare(*mn) < 0) mn = &v;
          if (!mx || v.compare(*mx) > 0) mx = &v;
        }
        if (mn) {
          info.min_v = wdetail::plain_one(col.type, *mn);
          info.max_v = wdetail::plain_one(col.type, *mx);
        }
      }

      // page header
      compact_writer ph;
      ph.begin_struct();
      ph.field_i32(1, 0);  // DATA_PAGE
      ph.field_i32(2, static_cast<int32_t>(body.size()));
      ph.field_i32(3, static_cast<int32_t>(body.size()));
      ph.field_struct(5);  // data_page_header
      ph.field_i32(1, static_cast<int32_t>(take));
      ph.field_i32(2, 0);  // PLAIN
      ph.field_i32(3, 3);  // definition levels: RLE
      ph.field_i32(4, 3);  // repetition levels: RLE
      ph.end_struct();
      ph.end_struct();

      info.offset = static_cast<int64_t>(out.size());
      out.append(ph.buffer());
      out.append(body);
      info.total_size = static_cast<int64_t>(out.size()) - info.offset;
      gi.total_bytes += info.total_size;
      gi.chunks.push_back(std::move(info));
    }
    groups.push_back(std::move(gi));
    if (num_rows == 0) break;
  }

  // footer
  compact_writer w;
  w.begin_struct();
  w.field_i32(1, 1);  // version
  w.field_list(2, ct_struct, static_cast<uint32_t>(cols.size() + 1));
  {
    w.elem_struct_begin();  // root
    w.field_binary(4, "schema");
    w.field_i32(5, static_cast<int32_t>(cols.size()));
    w.elem_struct_end();
    for (const auto& col : cols) {
      w.elem_struct_begin();
      w.field_i32(1, static_cast<int32_t>(col.type));
      w.field_i32(3, col.nullable ? 1 : 0);  // OPTIONAL : REQUIRED
      w.field_binary(4, col.name);
      int32_t conv = wdetail::converted_type_id(col.logical);
      if (conv >= 0) w.field_i32(6, conv);
      w.elem_struct_end();
    }
  }
  w.field_i64(3, num_rows);
  w.field_list(4, ct_struct, static_cast<uint32_t>(groups.size()));
  for (const auto& gi : groups) {
    w.elem_struct_begin();
    w.field_list(1, ct_struct, static_cast<uint32_t>(gi.chunks.size()));
    for (size_t ci = 0; ci < gi.chunks.size(); ++ci) {
      const auto& info = gi.chunks[ci];
      w.elem_struct_begin();  // ColumnChunk
      w.field_i64(2, info.offset);
      w.field_struct(3);  // ColumnMetaData
      w.field_i32(1, static_cast<int32_t>(cols[ci].type));
      w.field_list(2, ct_i32, 2);
      w.elem_i32(0);  // PLAIN
      w.elem_i32(3);  // RLE
      w.field_list(3, ct_binary, 1);
      w.elem_binary(cols[ci].name);
      w.field_i32(4, 0);  // UNCOMPRESSED
      w.field_i64(5, info.num_values);
      w.field_i64(6, info.total_size);
      w.field_i64(7, info.total_size);
      w.field_i64(9, info.offset);
      if (info.min_v) {
        w.field_struct(12);
        w.field_i64(3, info.null_count);
        w.field_binary(5, *info.max_v);
        w.field_binary(6, *info.min_v);
        w.end_struct();
      }
      w.end_struct();  // ColumnMetaData
      w.elem_struct_end();
    }
    w.field_i64(2, gi.total_bytes);
    w.field_i64(3, gi.num_rows);
    w.elem_struct_end();
  }
  w.field_binary(6, opt.created_by);
  w.end_struct();

  byte_buffer footer = w.take();
  out.append(footer);
  wdetail::append_u32(out, static_cast<uint32_t>(footer.size()));
  out.append("PAR1");
  return out;
}

}  // namespace rill::parquet
