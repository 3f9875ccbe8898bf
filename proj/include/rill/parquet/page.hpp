#pragma once

#include <cstring>
#include <functional>
#include <string_view>
#include <vector>

#include "rill/common.hpp"
#include "rill/parquet/codec.hpp"
#include "rill/parquet/format.hpp"
#include "rill/parquet/levels.hpp"
#include "rill/parquet/schema.hpp"
#include "rill/value.hpp"

namespace rill::parquet {

// One decoded leaf column chunk: definition/repetition level streams plus the
// non-null values, Parquet convention (values exclude nulls).
struct decoded_column {
  std::vector<uint16_t> def_levels;  // empty when max_def == 0
  std::vector<uint16_t> rep_levels;  // empty when max_rep == 0
  std::vector<value> values;
  int max_def = 0;
  int max_rep = 0;

  size_t entry_count() const {
    return max_def > 0 ? def_levels.size() : values.size();
  }

  uint16_t def_at(size_t i) const { return def_levels.empty() ? 0 : def_levels[i]; }
  uint16_t rep_at(size_t i) const { return rep_levels.empty() ? 0 : rep_levels[i]; }

  void check_invariants() const {
    if (!def_levels.empty() && !rep_levels.empty() &&
        def_levels.size() != rep_levels.size()) {
      raise(errc::level_mismatch, "definition/repetition level length mismatch");
    }
    if (max_def > 0) {
      size_t present = 0;
      for (uint16_t d : def_levels) present += (d == max_def) ? 1 : 0;
      if (present != values.size()) {
        raise(errc::level_mismatch,
              "value count " + std::to_string(values.size()) +
                  " != max-definition-level count " + std::to_string(present));
      }
    }
  }
};

namespace detail {

// Per-leaf primitive decoder with the logical-type conversion baked in.
class plain_decoder {
 public:
  plain_decoder(const schema_node& leaf) : leaf_(leaf) {}

  // Decode `n` PLAIN values from `data`, appending to `out`.
  void decode(std::string_view data, size_t n, std::vector<value>& out) const {
    const char* p = data.data();
    const char* end = p + data.size();
    auto need = [&](size_t k) {
      if (static_cast<size_t>(end - p) < k) {
        raise(errc::page_corrupt, "plain: truncated values");
      }
    };
    switch (*leaf_.ptype) {
      case physical_type::boolean: {
        bit_reader bits(data);
        for (size_t i = 0; i < n; ++i) out.push_back(value::boolean(bits.read(1) != 0));
        return;
      }
      case physical_type::int32:
        for (size_t i = 0; i < n; ++i) {
          need(4);
          int32_t v;
          std::memcpy(&v, p, 4);
          p += 4;
          out.push_back(convert_i32(v));
        }
        return;
      case physical_type::int64:
        for (size_t i = 0; i < n; ++i) {
          need(8);
          int64_t v;
          std::memcpy(&v, p, 8);
          p += 8;
          out.push_back(convert_i64(v));
        }
        return;
      case physical_type::flt:
        for (size_t i = 0; i < n; ++i) {
          need(4);
          float v;
          std::memcpy(&v, p, 4);
          p += 4;
          out.push_back(value::f64(static_cast<double>(v)));
        }
        return;
      case physical_type::dbl:
        for (size_t i = 0; i < n; ++i) {
          need(8);
          double v;
          std::memcpy(&v, p, 8);
          p += 8;
          out.push_back(value::f64(v));
        }
        return;
      case physical_type::byte_array: {
        bool text = is_text();
        for (size_t i = 0; i < n; ++i) {
          need(4);
          uint32_t len;
          std::memcpy(&len, p, 4);
          p += 4;
          need(len);
          std::string v(p, len);
          p += len;
          out.push_back(text ? value::str(std::move(v)) : value::bytes(std::move(v)));
        }
        return;
      }
      case physical_type::fixed_len_byte_array: {
        size_t width = static_cast<size_t>(leaf_.type_length);
        if (width == 0) raise(errc::page_corrupt, "flba: zero type length");
        for (size_t i = 0; i < n; ++i) {
          need(width);
          out.push_back(value::bytes(std::string(p, width)));
          p += width;
        }
        return;
      }
      case physical_type::int96:
        raise(errc::unsupported_feature, "INT96 values");
    }
    raise(errc::page_corrupt, "plain: unknown physical type");
  }

 private:
  bool is_text() const {
    switch (leaf_.logical.kind) {
      case logical_kind::string:
      case logical_kind::json:
      case logical_kind::enumeration:
        return true;
      default:
        return false;
    }
  }

  value convert_i32(int32_t v) const {
    switch (leaf_.logical.kind) {
      case logical_kind::date: return value::date(v);
      case logical_kind::decimal: return value::decimal(v, leaf_.logical.scale);
      default: return value::i64(v);
    }
  }

  value convert_i64(int64_t v) const {
    switch (leaf_.logical.kind) {
      case logical_kind::timestamp_millis: return value::timestamp(v * 1000);
      case logical_kind::timestamp_micros: return value::timestamp(v);
      case logical_kind::decimal: return value::decimal(v, leaf_.logical.scale);
      default: return value::i64(v);
    }
  }

  const schema_node& leaf_;
};

inline std::vector<uint16_t> to_u16(const std::vector<uint32_t>& in) {
  std::vector<uint16_t> out(in.size());
  for (size_t i = 0; i < in.size(); ++i) out[i] = static_cast<uint16_t>(in[i]);
  return out;
}

}  // namespace detail

inline void decode_values(encoding enc, std::string_view data, size_t non_null,
                          const detail::plain_decoder& plain,
                          const std::vector<value>& dictionary, bool have_dictionary,
                          std::vector<value>& out);

// Decode every page of one column chunk. `chunk_bytes` covers exactly the
// chunk's pages (dictionary page first when present).
inline decoded_column decode_column_chunk(std::string_view chunk_bytes,
                                          const column_chunk_meta& meta,
                                          const schema_node& leaf) {
  decoded_column out;
  out.max_def = leaf.max_def;
  out.max_rep = leaf.max_rep;
  detail::plain_decoder plain(leaf);
  std::vector<value> dictionary;
  bool have_dictionary = false;

  size_t cursor = 0;
  int64_t entries_seen = 0;
  while (entries_seen < meta.num_values) {
    if (cursor >= chunk_bytes.size()) {
      raise(errc::page_corrupt, "chunk ends before all values decoded");
    }
    size_t header_len = 0;
    page_header h;
    try {
      h = decode_page_header(chunk_bytes.substr(cursor), header_len);
    } catch (const error& e) {
      raise(errc::page_corrupt, std::string("page header: ") + e.what());
    }
    cursor += header_len;
    if (h.compressed_size < 0 ||
        cursor + static_cast<size_t>(h.compressed_size) > chunk_bytes.size()) {
      raise(errc::page_corrupt, "page body past chunk end");
    }
    std::string_view body_raw =
        chunk_bytes.substr(cursor, static_cast<size_t>(h.compressed_size));
    cursor += static_cast<size_t>(h.compressed_size);

    switch (h.kind) {
      case page_kind::dictionary: {
        byte_buffer body = decompress(meta.codec, body_raw,
                                      static_cast<size_t>(h.uncompressed_size));
        if (h.values_encoding != encoding::plain &&
            h.values_encoding != encoding::plain_dictionary) {
          raise(errc::unsupported_encoding, "dictionary page encoding");
        }
        dictionary.clear();
        plain.decode(body, static_cast<size_t>(h.num_values), dictionary);
        have_dictionary = true;
        break;
      }
      case page_kind::data: {
        byte_buffer body = decompress(meta.codec, body_raw,
                                      static_cast<size_t>(h.uncompressed_size));
        std::string_view rest(body);
        size_t n = static_cast<size_t>(h.num_values);
        // v1 level streams carry a 4-byte length prefix
        auto take_levels = [&](int max_level, encoding enc) -> std::vector<uint16_t> {
          if (max_level == 0) return {};
          if (enc != encoding::rle) {
            raise(errc::unsupported_encoding, "level encoding");
          }
          if (rest.size() < 4) raise(errc::page_corrupt, "levels: truncated prefix");
          uint32_t len;
          std::memcpy(&len, rest.data(), 4);
          rest.remove_prefix(4);
          if (rest.size() < len) raise(errc::page_corrupt, "levels: truncated data");
          auto lv = decode_rle_hybrid(rest.substr(0, len), bit_width_for(max_level), n);
          rest.remove_prefix(len);
          return detail::to_u16(lv);
        };
        auto rep = take_levels(leaf.max_rep, h.rep_encoding);
        auto def = take_levels(leaf.max_def, h.def_encoding);
        size_t non_null = n;
        if (leaf.max_def > 0) {
          non_null = 0;
          for (uint16_t d : def) non_null += (d == leaf.max_def) ? 1 : 0;
        }
        out.rep_levels.insert(out.rep_levels.end(), rep.begin(), rep.end());
        out.def_levels.insert(out.def_levels.end(), def.begin(), def.end());
        decode_values(h.values_encoding, rest, non_null, plain, dictionary,
                      have_dictionary, out.values);
        entries_seen += static_cast<int64_t>(n);
        break;
      }
      case page_kind::data_v2: {
        size_t rep_len = static_cast<size_t>(h.rep_levels_byte_length);
        size_t def_len = static_cast<size_t>(h.def_levels_byte_length);
        if (rep_len + def_len > body_raw.size()) {
          raise(errc::page_corrupt, "v2 page: level lengths past body");
        }
        size_t n = static_cast<size_t>(h.num_values);
        if (leaf.max_rep > 0) {
          auto lv = decode_rle_hybrid(body_raw.substr(0, rep_len),
                                      bit_width_for(leaf.max_rep), n);
          auto u = detail::to_u16(lv);
          out.rep_levels.insert(out.rep_levels.end(), u.begin(), u.end());
        }
        if (leaf.max_def > 0) {
          auto lv = decode_rle_hybrid(body_raw.substr(rep_len, def_len),
                                      bit_width_for(leaf.max_def), n);
          auto u = detail::to_u16(lv);
          out.def_levels.insert(out.def_levels.end(), u.begin(), u.end());
        }
        std::string_view values_raw = body_raw.substr(rep_len + def_len);
        size_t values_uncompressed =
            static_cast<size_t>(h.uncompressed_size) - rep_len - def_len;
        byte_buffer values_body =
            h.v2_is_compressed
                ? decompress(meta.codec, values_raw, values_uncompressed)
                : byte_buffer(values_raw);
        size_t non_null = n - static_cast<size_t>(h.num_nulls);
        decode_values(h.values_encoding, values_body, non_null, plain, dictionary,
                      have_dictionary, out.values);
        entries_seen += static_cast<int64_t>(n);
        break;
      }
      case page_kind::index:
        break;  // ignorable
      default:
        raise(errc::page_corrupt, "unknown page type");
    }
  }
  out.check_invariants();
  return out;
}

inline void decode_values(encoding enc, std::string_view data, size_t non_null,
                          const detail::plain_decoder& plain,
                          const std::vector<value>& dictionary, bool have_dictionary,
                          std::vector<value>& out) {
  switch (enc) {
    case encoding::plain:
      plain.decode(data, non_null, out);
      return;
    case encoding::plain_dictionary:
    case encoding::rle_dictionary: {
      if (!have_dictionary) raise(errc::page_corrupt, "dictionary page missing");
      if (non_null == 0) return;
      if (data.empty()) raise(errc::page_corrupt, "dictionary indices missing");
      int bw = static_cast<uint8_t>(data[0]);
      auto idx = decode_rle_hybrid(data.substr(1), bw, non_null);
      for (uint32_t i : idx) {
        if (i >= dictionary.size()) raise(errc::page_corrupt, "dictionary index range");
        out.push_back(dictionary[i]);
      }
      return;
    }
    case encoding::rle: {
      // Boolean values: 4-byte length prefix then hybrid at bit width 1.
      if (data.size() < 4) raise(errc::page_corrupt, "rle values: truncated prefix");
      uint32_t len;
      std::memcpy(&len, data.data(), 4);
      if (data.size() - 4 < len) raise(errc::page_corrupt, "rle values: truncated");
      auto bits = decode_rle_hybrid(data.substr(4, len), 1, non_null);
      for (uint32_t b : bits) out.push_back(value::boolean(b != 0));
      return;
    }
    default:
      raise(errc::unsupported_encoding,
            "value encoding " + std::to_string(static_cast<int>(enc)));
  }
}

}  // namespace rill::parquet
