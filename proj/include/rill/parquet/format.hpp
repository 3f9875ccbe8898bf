#pragma once

// Parquet footer and page-header structures, decoded from the thrift compact
// protocol. Field ids follow the Apache Parquet format definition.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rill/common.hpp"
#include "rill/io/byte_range.hpp"
#include "rill/parquet/thrift.hpp"

namespace rill::parquet {

enum class physical_type : int32_t {
  boolean = 0,
  int32 = 1,
  int64 = 2,
  int96 = 3,
  flt = 4,
  dbl = 5,
  byte_array = 6,
  fixed_len_byte_array = 7,
};

enum class compression_codec : int32_t {
  uncompressed = 0,
  snappy = 1,
  gzip = 2,
  lzo = 3,
  brotli = 4,
  lz4 = 5,
  zstd = 6,
  lz4_raw = 7,
};

enum class encoding : int32_t {
  plain = 0,
  plain_dictionary = 2,
  rle = 3,
  bit_packed = 4,
  delta_binary_packed = 5,
  delta_length_byte_array = 6,
  delta_byte_array = 7,
  rle_dictionary = 8,
  byte_stream_split = 9,
};

enum class repetition : int32_t { required = 0, optional = 1, repeated = 2 };

enum class page_kind : int32_t { data = 0, index = 1, dictionary = 2, data_v2 = 3 };

inline std::string_view physical_type_name(physical_type t) {
  switch (t) {
    case physical_type::boolean: return "BOOLEAN";
    case physical_type::int32: return "INT32";
    case physical_type::int64: return "INT64";
    case physical_type::int96: return "INT96";
    case physical_type::flt: return "FLOAT";
    case physical_type::dbl: return "DOUBLE";
    case physical_type::byte_array: return "BYTE_ARRAY";
    case physical_type::fixed_len_byte_array: return "FIXED_LEN_BYTE_ARRAY";
  }
  return "?";
}

inline std::string_view codec_name(compression_codec c) {
  switch (c) {
    case compression_codec::uncompressed: return "UNCOMPRESSED";
    case compression_codec::snappy: return "SNAPPY";
    case compression_codec::gzip: return "GZIP";
    case compression_codec::lzo: return "LZO";
    case compression_codec::brotli: return "BROTLI";
    case compression_codec::lz4: return "LZ4";
    case compression_codec::zstd: return "ZSTD";
    case compression_codec::lz4_raw: return "LZ4_RAW";
  }
  return "?";
}

enum class logical_kind : uint8_t {
  none,
  string,
  date,
  timestamp_millis,
  timestamp_micros,
  timestamp_nanos,
  decimal,
  integer,
  json,
  enumeration,
  time,
  uuid,
  map,
  list,
  other,
};

struct logical_type {
  logical_kind kind = logical_kind::none;
  int32_t scale = 0;
  int32_t precision = 0;
  bool adjusted_to_utc = false;
};

struct schema_element {
  std::string name;
  std::optional<physical_type> type;       // absent for groups
  int32_t type_length = 0;                 // FIXED_LEN_BYTE_ARRAY width
  std::optional<repetition> repetition_type;
  int32_t num_children = 0;
  logical_type logical;
};

struct column_statistics {
  std::optional<std::string> min_value;  // plain-encoded bytes
  std::optional<std::string> max_value;
  std::optional<int64_t> null_count;
};

struct column_chunk_meta {
  std::vector<std::string> path_in_schema;
  physical_type type = physical_type::boolean;
  compression_codec codec = compression_codec::uncompressed;
  std::vector<encoding> encodings;
  int64_t num_values = 0;
  int64_t total_compressed_size = 0;
  int64_t total_uncompressed_size = 0;
  int64_t data_page_offset = 0;
  std::optional<int64_t> dictionary_page_offset;
  std::optional<int64_t> index_page_offset;
  column_statistics stats;
  bool has_crypto_metadata = false;

  std::string dotted_path() const {
    std::string out;
    for (const auto& part : path_in_schema) {
      if (!out.empty()) out.push_back('.');
      out += part;
    }
    return out;
  }

  io::byte_range pages_range() const {
    int64_t start = data_page_offset;
    if (dictionary_page_offset && *dictionary_page_offset > 0 &&
        *dictionary_page_offset < start) {
      start = *dictionary_page_offset;
    }
    return {static_cast<uint64_t>(start), static_cast<uint64_t>(total_compressed_size)};
  }
};

struct row_group_meta {
  int64_t num_rows = 0;
  int64_t total_byte_size = 0;
  std::vector<column_chunk_meta> columns;
};

struct file_metadata_raw {
  int32_t version = 0;
  std::vector<schema_element> schema;
  int64_t num_rows = 0;
  std::vector<row_group_meta> row_groups;
  std::optional<std::string> created_by;
};

struct page_header {
  page_kind kind = page_kind::data;
  int32_t uncompressed_size = 0;
  int32_t compressed_size = 0;
  // data page v1
  int32_t num_values = 0;
  encoding values_encoding = encoding::plain;
  encoding def_encoding = encoding::rle;
  encoding rep_encoding = encoding::rle;
  // data page v2 extras
  int32_t num_nulls = 0;
  int32_t num_rows = 0;
  int32_t def_levels_byte_length = 0;
  int32_t rep_levels_byte_length = 0;
  bool v2_is_compressed = true;
};

namespace detail {

using thrift::compact_reader;
using thrift::compact_type;
using thrift::field_info;

inline logical_type decode_logical_type(compact_reader& r) {
  logical_type out;
  r.begin_struct();
  field_info f;
  while (r.next_field(f)) {
    // LogicalType is a union; exactly one field is set.
    switch (f.id) {
      case 1: out.kind = logical_kind::string; r.skip(f.type); break;
      case 2: out.kind = logical_kind::map; r.skip(f.type); break;
      case 3: out.kind = logical_kind::list; r.skip(f.type); break;
      case 4: out.kind = logical_kind::enumeration; r.skip(f.type); break;
      case 5: {  // DECIMAL
        out.kind = logical_kind::decimal;
        r.begin_struct();
        field_info g;
        while (r.next_field(g)) {
          if (g.id == 1) out.scale = r.read_i32();
          else if (g.id == 2) out.precision = r.read_i32();
          else r.skip(g.type);
        }
        r.end_struct();
        break;
      }
      case 6: out.kind = logical_kind::date; r.skip(f.type); break;
      case 7: out.kind = logical_kind::time; r.skip(f.type); break;
      case 8: {  // TIMESTAMP { isAdjustedToUTC, unit }
        r.begin_struct();
        field_info g;
        logical_kind unit = logical_kind::timestamp_micros;
        bool utc = false;
        while (r.next_field(g)) {
          if (g.id == 1) {
            utc = g.bool_value;
          } else if (g.id == 2) {
            // TimeUnit union: 1 MILLIS, 2 MICROS, 3 NANOS
            r.begin_struct();
            field_info u;
            while (r.next_field(u)) {
              if (u.id == 1) unit = logical_kind::timestamp_millis;
              else if (u.id == 2) unit = logical_kind::timestamp_micros;
              else if (u.id == 3) unit = logical_kind::timestamp_nanos;
              r.skip(u.type);
            }
            r.end_struct();
          } else {
            r.skip(g.type);
          }
        }
        r.end_struct();
        out.kind = unit;
        out.adjusted_to_utc = utc;
        break;
      }
      case 10: {  // INTEGER
        out.kind = logical_kind::integer;
        r.skip(f.type);
        break;
      }
      case 12: out.kind = logical_kind::json; r.skip(f.type); break;
      case 14: out.kind = logical_kind::uuid; r.skip(f.type); break;
      default:
        out.kind = logical_kind::other;
        r.skip(f.type);
        break;
    }
  }
  r.end_struct();
  return out;
}

inline logical_type from_converted_type(int32_t ct, int32_t scale, int32_t precision) {
  logical_type out;
  switch (ct) {
    case 0: out.kind = logical_kind::string; break;  // UTF8
    case 1: out.kind = logical_kind::map; break;
    case 3: out.kind = logical_kind::list; break;
    case 4: out.kind = logical_kind::enumeration; break;
    case 5:
      out.kind = logical_kind::decimal;
      out.scale = scale;
      out.precision = precision;
      break;
    case 6: out.kind = logical_kind::date; break;
    case 9: out.kind = logical_kind::timestamp_millis; break;
    case 10: out.kind = logical_kind::timestamp_micros; break;
    case 19: out.kind = logical_kind::json; break;
    default: out.kind = logical_kind::other; break;
  }
  return out;
}

inline schema_element decode_schema_element(compact_reader& r) {
  schema_element el;
  std::optional<int32_t> converted;
  int32_t scale = 0, precision = 0;
  bool has_logical = false;
  r.begin_struct();
  field_info f;
  while (r.next_field(f)) {
    switch (f.id) {
      case 1: el.type = static_cast<physical_type>(r.read_i32()); break;
      case 2: el.type_length = r.read_i32(); break;
      case 3: el.repetition_type = static_cast<repetition>(r.read_i32()); break;
      case 4: el.name = std::string(r.read_binary()); break;
      case 5: el.num_children = r.read_i32(); break;
      case 6: converted = r.read_i32(); break;
      case 7: scale = r.read_i32(); break;
      case 8: precision = r.read_i32(); break;
      case 10:
        el.logical = decode_logical_type(r);
        has_logical = true;
        break;
      default: r.skip(f.type); break;
    }
  }
  r.end_struct();
  if (!has_logical && converted) {
    el.logical = from_converted_type(*converted, scale, precision);
  }
  return el;
}

inline column_statistics decode_statistics(compact_reader& r) {
  column_statistics st;
  std::optional<std::string> legacy_min, legacy_max;
  r.begin_struct();
  field_info f;
  while (r.next_field(f)) {
    switch (f.id) {
      case 1: legacy_max = std::string(r.read_binary()); break;
      case 2: legacy_min = std::string(r.read_binary()); break;
      case 3: st.null_count = r.read_i64(); break;
      case 5: st.max_value = std::string(r.read_binary()); break;
      case 6: st.min_value = std::string(r.read_binary()); break;
      default: r.skip(f.type); break;
    }
  }
  r.end_struct();
  // Trust stats as written; prefer the order-aware min_value/max_value pair.
  if (!st.min_value && legacy_min) st.min_value = legacy_min;
  if (!st.max_value && legacy_max) st.max_value = legacy_max;
  return st;
}

inline column_chunk_meta decode_column_meta(compact_reader& r) {
  column_chunk_meta c;
  r.begin_struct();
  field_info f;
  while (r.next_field(f)) {
    switch (f.id) {
      case 1: c.type = static_cast<physical_type>(r.read_i32()); break;
      case 2: {
        auto [elem, count] = r.read_list_header();
        for (uint32_t i = 0; i < count; ++i) {
          c.encodings.push_back(static_cast<encoding>(r.read_i32()));
        }
        (void)elem;
        break;
      }
      case 3: {
        auto [elem, count] = r.read_list_header();
        for (uint32_t i = 0; i < count; ++i) {
          c.path_in_schema.emplace_back(r.read_binary());
        }
        (void)elem;
        break;
      }
      case 4: c.codec = static_cast<compression_codec>(r.read_i32()); break;
      case 5: c.num_values = r.read_i64(); break;
      case 6: c.total_uncompressed_size = r.read_i64(); break;
      case 7: c.total_compressed_size = r.read_i64(); break;
      case 9: c.data_page_offset = r.read_i64(); break;
      case 10: c.index_page_offset = r.read_i64(); break;
      case 11: c.dictionary_page_offset = r.read_i64(); break;
      case 12: c.stats = decode_statistics(r); break;
      default: r.skip(f.type); break;
    }
  }
  r.end_struct();
  return c;
}

inline column_chunk_meta decode_column_chunk(compact_reader& r) {
  column_chunk_meta c;
  r.begin_struct();
  field_info f;
  while (r.next_field(f)) {
    switch (f.id) {
      case 3: c = decode_column_meta(r); break;
      case 8:  // crypto_metadata
        c.has_crypto_metadata = true;
        r.skip(f.type);
        break;
      default: r.skip(f.type); break;
    }
  }
  r.end_struct();
  return c;
}

inline row_group_meta decode_row_group(compact_reader& r) {
  row_group_meta rg;
  r.begin_struct();
  field_info f;
  while (r.next_field(f)) {
    switch (f.id) {
      case 1: {
        auto [elem, count] = r.read_list_header();
        for (uint32_t i = 0; i < count; ++i) rg.columns.push_back(decode_column_chunk(r));
        (void)elem;
        break;
      }
      case 2: rg.total_byte_size = r.read_i64(); break;
      case 3: rg.num_rows = r.read_i64(); break;
      default: r.skip(f.type); break;
    }
  }
  r.end_struct();
  return rg;
}

}  // namespace detail

inline file_metadata_raw decode_file_metadata(std::string_view footer) {
  try {
    thrift::compact_reader r(footer);
    file_metadata_raw out;
    r.begin_struct();
    thrift::field_info f;
    while (r.next_field(f)) {
      switch (f.id) {
        case 1: out.version = r.read_i32(); break;
        case 2: {
          auto [elem, count] = r.read_list_header();
          for (uint32_t i = 0; i < count; ++i) {
            out.schema.push_back(detail::decode_schema_element(r));
          }
          (void)elem;
          break;
        }
        case 3: out.num_rows = r.read_i64(); break;
        case 4: {
          auto [elem, count] = r.read_list_header();
          for (uint32_t i = 0; i < count; ++i) {
            out.row_groups.push_back(detail::decode_row_group(r));
          }
          (void)elem;
          break;
        }
        case 6: out.created_by = std::string(r.read_binary()); break;
        case 8:  // encryption_algorithm
          raise(errc::unsupported_feature, "encrypted parquet footer metadata");
        default: r.skip(f.type); break;
      }
    }
    r.end_struct();
    if (out.schema.empty()) raise(errc::footer_corrupt, "empty schema");
    return out;
  } catch (const error& e) {
    if (e.code() == errc::footer_corrupt || e.code() == errc::unsupported_feature) throw;
    raise(errc::footer_corrupt, e.what());
  }
}

inline page_header decode_page_header(std::string_view data, size_t& consumed) {
  thrift::compact_reader r(data);
  page_header h;
  r.begin_struct();
  thrift::field_info f;
  bool saw_any = false;
  while (r.next_field(f)) {
    saw_any = true;
    switch (f.id) {
      case 1: h.kind = static_cast<page_kind>(r.read_i32()); break;
      case 2: h.uncompressed_size = r.read_i32(); break;
      case 3: h.compressed_size = r.read_i32(); break;
      case 5: {  // DataPageHeader
        r.begin_struct();
        thrift::field_info g;
        while (r.next_field(g)) {
          switch (g.id) {
            case 1: h.num_values = r.read_i32(); break;
            case 2: h.values_encoding = static_cast<encoding>(r.read_i32()); break;
            case 3: h.def_encoding = static_cast<encoding>(r.read_i32()); break;
            case 4: h.rep_encoding = static_cast<encoding>(r.read_i32()); break;
            default: r.skip(g.type); break;
          }
        }
        r.end_struct();
        break;
      }
      case 7: {  // DictionaryPageHeader
        r.begin_struct();
        thrift::field_info g;
        while (r.next_field(g)) {
          switch (g.id) {
            case 1: h.num_values = r.read_i32(); break;
            case 2: h.values_encoding = static_cast<encoding>(r.read_i32()); break;
            default: r.skip(g.type); break;
          }
        }
        r.end_struct();
        break;
      }
      case 8: {  // DataPageHeaderV2
        r.begin_struct();
        thrift::field_info g;
        while (r.next_field(g)) {
          switch (g.id) {
            case 1: h.num_values = r.read_i32(); break;
            case 2: h.num_nulls = r.read_i32(); break;
            case 3: h.num_rows = r.read_i32(); break;
            case 4: h.values_encoding = static_cast<encoding>(r.read_i32()); break;
            case 5: h.def_levels_byte_length = r.read_i32(); break;
            case 6: h.rep_levels_byte_length = r.read_i32(); break;
            case 7: h.v2_is_compressed = g.bool_value; break;
            default: r.skip(g.type); break;
          }
        }
        r.end_struct();
        break;
      }
      default: r.skip(f.type); break;
    }
  }
  r.end_struct();
  if (!saw_any) raise(errc::page_corrupt, "empty page header");
  consumed = r.offset();
  return h;
}

}  // namespace rill::parquet
