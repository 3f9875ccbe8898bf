#pragma once

#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rill/common.hpp"
#include "rill/parquet/codec.hpp"
#include "rill/value.hpp"

namespace rill::iceberg {

// Avro decoding covers what Iceberg manifests use: object container files
// with null/deflate codecs; records, strings, longs, ints, bytes, booleans,
// floats, doubles, fixed, enums, arrays, maps, and unions. Anything else
// raises UnsupportedAvroFeature.

struct avro_type {
  enum class kind {
    null_t, bool_t, int_t, long_t, float_t, double_t, bytes_t, string_t,
    record_t, enum_t, array_t, map_t, union_t, fixed_t,
  };
  kind k = kind::null_t;
  std::string name;                                            // record/enum/fixed
  std::vector<std::pair<std::string, std::shared_ptr<avro_type>>> fields;
  std::vector<std::shared_ptr<avro_type>> branches;             // union
  std::shared_ptr<avro_type> elem;                              // array items / map values
  std::vector<std::string> symbols;                             // enum
  uint64_t size = 0;                                            // fixed
};

using avro_type_ptr = std::shared_ptr<avro_type>;

namespace detail {

inline avro_type_ptr compile_avro(const nlohmann::json& s,
                                  std::map<std::string, avro_type_ptr>& named);

inline avro_type_ptr primitive_avro(const std::string& name,
                                    const std::map<std::string, avro_type_ptr>& named) {
  auto mk = [](avro_type::kind k) {
    auto t = std::make_shared<avro_type>();
    t->k = k;
    return t;
  };
  if (name == "null") return mk(avro_type::kind::null_t);
  if (name == "boolean") return mk(avro_type::kind::bool_t);
  if (name == "int") return mk(avro_type::kind::int_t);
  if (name == "long") return mk(avro_type::kind::long_t);
  if (name == "float") return mk(avro_type::kind::float_t);
  if (name == "double") return mk(avro_type::kind::double_t);
  if (name == "bytes") return mk(avro_type::kind::bytes_t);
  if (name == "string") return mk(avro_type::kind::string_t);
  auto it = named.find(name);
  if (it != named.end()) return it->second;
  raise(errc::unsupported_avro_feature, "avro type " + name);
}

inline avro_type_ptr compile_avro(const nlohmann::json& s,
                                  std::map<std::string, avro_type_ptr>& named) {
  if (s.is_string()) return primitive_avro(s.get<std::string>(), named);
  if (s.is_array()) {
    auto t = std::make_shared<avro_type>();
    t->k = avro_type::kind::union_t;
    for (const auto& b : s) t->branches.push_back(compile_avro(b, named));
    return t;
  }
  if (!s.is_object() || !s.contains("type")) {
    raise(errc::unsupported_avro_feature, "malformed avro schema node");
  }
  const auto& tn = s["type"];
  if (tn.is_object() || tn.is_array()) return compile_avro(tn, named);
  std::string tname = tn.get<std::string>();
  if (tname == "record") {
    auto t = std::make_shared<avro_type>();
    t->k = avro_type::kind::record_t;
    t->name = s.value("name", "");
    if (!t->name.empty()) named[t->name] = t;  // allow self/later references
    for (const auto& f : s.at("fields")) {
      t->fields.emplace_back(f.at("name").get<std::string>(),
                             compile_avro(f.at("type"), named));
    }
    return t;
  }
  if (tname == "array") {
    auto t = std::make_shared<avro_type>();
    t->k = avro_type::kind::array_t;
    t->elem = compile_avro(s.at("items"), named);
    return t;
  }
  if (tname == "map") {
    auto t = std::make_shared<avro_type>();
    t->k = avro_type::kind::map_t;
    t->elem = compile_avro(s.at("values"), named);
    return t;
  }
  if (tname == "enum") {
    auto t = std::make_shared<avro_type>();
    t->k = avro_type::kind::enum_t;
    t->name = s.value("name", "");
    t->symbols = s.at("symbols").get<std::vector<std::string>>();
    if (!t->name.empty()) named[t->name] = t;
    return t;
  }
  if (tname == "fixed") {
    auto t = std::make_shared<avro_type>();
    t->k = avro_type::kind::fixed_t;
    t->name = s.value("name", "");
    t->size = s.at("size").get<uint64_t>();
    if (!t->name.empty()) named[t->name] = t;
    return t;
  }
  return primitive_avro(tname, named);  // {"type": "long", "logicalType": ...}
}

class avro_decoder {
 public:
  explicit avro_decoder(std::string_view data)
      : p_(reinterpret_cast<const uint8_t*>(data.data())), end_(p_ + data.size()) {}

  bool at_end() const { return p_ >= end_; }

  int64_t read_long() {
    uint64_t u = 0;
    int shift = 0;
    for (;;) {
      if (p_ >= end_) raise(errc::manifest_corrupt, "avro: truncated varint");
      uint8_t b = *p_++;
      u |= static_cast<uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) break;
      shift += 7;
      if (shift > 63) raise(errc::manifest_corrupt, "avro: varint overflow");
    }
    return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
  }

  std::string_view read_bytes() {
    int64_t n = read_long();
    if (n < 0 || static_cast<uint64_t>(n) > static_cast<uint64_t>(end_ - p_)) {
      raise(errc::manifest_corrupt, "avro: truncated bytes");
    }
    std::string_view out(reinterpret_cast<const char*>(p_), static_cast<size_t>(n));
    p_ += n;
    return out;
  }

  std::string_view read_fixed(uint64_t n) {
    if (n > static_cast<uint64_t>(end_ - p_)) {
      raise(errc::manifest_corrupt, "avro: truncated fixed");
    }
    std::string_view out(reinterpret_cast<const char*>(p_), n);
    p_ += n;
    return out;
  }

  value read_datum(const avro_type& t) {
    switch (t.k) {
      case avro_type::kind::null_t:
        return value::null();
      case avro_type::kind::bool_t: {
        auto b = read_fixed(1);
        return value::boolean(b[0] != 0);
      }
      case avro_type::kind::int_t:
      case avro_type::kind::long_t:
        return value::i64(read_long());
      case avro_type::kind::float_t: {
        auto raw = read_fixed(4);
        float f;
        std::memcpy(&f, raw.data(), 4);
        return value::f64(f);
      }
      case avro_type::kind::double_t: {
        auto raw = read_fixed(8);
        double d;
        std::memcpy(&d, raw.data(), 8);
        return value::f64(d);
      }
      case avro_type::kind::bytes_t:
        return value::bytes(std::string(read_bytes()));
      case avro_type::kind::string_t:
        return value::str(std::string(read_bytes()));
      case avro_type::kind::fixed_t:
        return value::bytes(std::string(read_fixed(t.size)));
      case avro_type::kind::enum_t: {
        int64_t idx = read_long();
        if (idx < 0 || static_cast<size_t>(idx) >= t.symbols.size()) {
          raise(errc::manifest_corrupt, "avro: enum index out of range");
        }
        return value::str(t.symbols[static_cast<size_t>(idx)]);
      }
      case avro_type::kind::record_t: {
        value::struct_t fields;
        fields.reserve(t.fields.size());
        for (const auto& [name, ft] : t.fields) {
          fields.emplace_back(name, read_datum(*ft));
        }
        return value::strct(std::move(fields));
      }
      case avro_type::kind::union_t: {
        int64_t idx = read_long();
        if (idx < 0 || static_cast<size_t>(idx) >= t.branches.size()) {
          raise(errc::manifest_corrupt, "avro: union index out of range");
        }
        return read_datum(*t.branches[static_cast<size_t>(idx)]);
      }
      case avro_type::kind::array_t: {
        value::list_t items;
        for (;;) {
          int64_t n = read_long();
          if (n == 0) break;
          if (n < 0) {
            read_long();  // block byte size, unused
            n = -n;
          }
          for (int64_t i = 0; i < n; ++i) items.push_back(read_datum(*t.elem));
        }
        return value::list(std::move(items));
      }
      case avro_type::kind::map_t: {
        value::struct_t entries;
        for (;;) {
          int64_t n = read_long();
          if (n == 0) break;
          if (n < 0) {
            read_long();
            n = -n;
          }
          for (int64_t i = 0; i < n; ++i) {
            std::string key(read_bytes());
            entries.emplace_back(std::move(key), read_datum(*t.elem));
          }
        }
        return value::strct(std::move(entries));
      }
    }
    raise(errc::unsupported_avro_feature, "avro: unhandled type");
  }

 private:
  const uint8_t* p_;
  const uint8_t* end_;
};

}  // namespace detail

// One parsed object-container file, fully decoded.
struct avro_file {
  nlohmann::json schema_json;
  avro_type_ptr schema;
  std::map<std::string, std::string> metadata;
  std::vector<value> records;
};

inline avro_file read_avro(std::string_view bytes) {
  avro_file out;
  detail::avro_decoder d(bytes);
  auto magic = d.read_fixed(4);
  if (magic != std::string_view("Obj\x01", 4)) {
    raise(errc::manifest_corrupt, "avro: bad container magic");
  }
  // file metadata: map<string, bytes>
  for (;;) {
    int64_t n = d.read_long();
    if (n == 0) break;
    if (n < 0) {
      d.read_long();
      n = -n;
    }
    for (int64_t i = 0; i < n; ++i) {
      std::string key(d.read_bytes());
      out.metadata[std::move(key)] = std::string(d.read_bytes());
    }
  }
  auto sync = std::string(d.read_fixed(16));

  auto schema_it = out.metadata.find("avro.schema");
  if (schema_it == out.metadata.end()) {
    raise(errc::manifest_corrupt, "avro: missing schema");
  }
  try {
    out.schema_json = nlohmann::json::parse(schema_it->second);
  } catch (const nlohmann::json::exception& e) {
    raise(errc::manifest_corrupt, std::string("avro: schema json: ") + e.what());
  }
  std::map<std::string, avro_type_ptr> named;
  out.schema = detail::compile_avro(out.schema_json, named);

  std::string codec = "null";
  if (auto it = out.metadata.find("avro.codec"); it != out.metadata.end()) {
    codec = it->second;
  }
  if (codec != "null" && codec != "deflate") {
    raise(errc::unsupported_avro_feature, "avro codec " + codec);
  }

  while (!d.at_end()) {
    int64_t count = d.read_long();
    int64_t size = d.read_long();
    if (count < 0 || size < 0) raise(errc::manifest_corrupt, "avro: bad block");
    std::string_view block = d.read_fixed(static_cast<uint64_t>(size));
    byte_buffer inflated;
    if (codec == "deflate") {
      try {
        inflated = parquet::inflate_raw_unknown(block);
      } catch (const error&) {
        raise(errc::manifest_corrupt, "avro: deflate block corrupt");
      }
      block = inflated;
    }
    detail::avro_decoder bd(block);
    for (int64_t i = 0; i < count; ++i) {
      out.records.push_back(bd.read_datum(*out.schema));
    }
    if (!bd.at_end()) raise(errc::manifest_corrupt, "avro: trailing block bytes");
    if (std::string(d.read_fixed(16)) != sync) {
      raise(errc::manifest_corrupt, "avro: sync marker mismatch");
    }
  }
  return out;
}

// Struct-field lookup helpers for decoded manifest records.
inline const value* field(const value& record, std::string_view name) {
  if (record.type() != value::kind::strct) return nullptr;
  for (const auto& [k, v] : record.as_struct()) {
    if (k == name) return &v;
  }
  return nullptr;
}

inline int64_t field_i64(const value& record, std::string_view name, int64_t fallback) {
  const value* v = field(record, name);
  return (v && !v->is_null()) ? v->as_i64() : fallback;
}

inline std::string field_str(const value& record, std::string_view name) {
  const value* v = field(record, name);
  if (!v || v->is_null()) {
    raise(errc::manifest_corrupt, "manifest record missing " + std::string(name));
  }
  return v->as_str();
}

}  // namespace rill::iceberg
