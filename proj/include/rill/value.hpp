#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rill/common.hpp"

namespace rill {

struct decimal_t {
  int64_t unscaled = 0;
  int32_t scale = 0;
  bool operator==(const decimal_t&) const = default;
};

// Runtime value: what a forced cell resolves to, what Parquet assembly emits,
// and what the SQL layer computes over.
class value {
 public:
  enum class kind : uint8_t {
    null,
    boolean,
    i64,
    f64,
    str,
    bytes,
    timestamp,  // microseconds since epoch
    date,       // days since epoch
    decimal,
    list,
    strct,
  };

  using list_t = std::vector<value>;
  using struct_t = std::vector<std::pair<std::string, value>>;

  value() : kind_(kind::null) {}

  static value null() { return value(); }
  static value boolean(bool v) { return value(kind::boolean, v); }
  static value i64(int64_t v) { return value(kind::i64, v); }
  static value f64(double v) { return value(kind::f64, v); }
  static value str(std::string v) { return value(kind::str, std::move(v)); }
  static value bytes(std::string v) { return value(kind::bytes, std::move(v)); }
  static value timestamp(int64_t micros) { return value(kind::timestamp, micros); }
  static value date(int32_t days) { return value(kind::date, static_cast<int64_t>(days)); }
  static value decimal(int64_t unscaled, int32_t scale) {
    value v(kind::decimal, decimal_t{unscaled, scale});
    return v;
  }
  static value list(list_t items) { return value(kind::list, std::move(items)); }
  static value strct(struct_t fields) { return value(kind::strct, std::move(fields)); }

  kind type() const { return kind_; }
  bool is_null() const { return kind_ == kind::null; }
  bool is_numeric() const { return kind_ == kind::i64 || kind_ == kind::f64; }

  bool as_bool() const { return std::get<bool>(data_); }
  int64_t as_i64() const { return std::get<int64_t>(data_); }
  double as_f64() const { return std::get<double>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }
  const decimal_t& as_decimal() const { return std::get<decimal_t>(data_); }
  const list_t& as_list() const { return std::get<list_t>(data_); }
  const struct_t& as_struct() const { return std::get<struct_t>(data_); }

  double numeric() const {
    if (kind_ == kind::i64) return static_cast<double>(as_i64());
    if (kind_ == kind::f64) return as_f64();
    raise(errc::type_error, "not numeric: " + type_name());
  }

  std::string type_name() const {
    switch (kind_) {
      case kind::null: return "null";
      case kind::boolean: return "boolean";
      case kind::i64: return "int";
      case kind::f64: return "float";
      case kind::str: return "string";
      case kind::bytes: return "bytes";
      case kind::timestamp: return "timestamp";
      case kind::date: return "date";
      case kind::decimal: return "decimal";
      case kind::list: return "list";
      case kind::strct: return "struct";
    }
    return "?";
  }

  // Strict equality; int and float compare numerically. Null != null here;
  // null-safe equality (Iceberg equality deletes) is equals_null_safe.
  bool equals(const value& o) const {
    if (is_null() || o.is_null()) return false;
    return equals_non_null(o);
  }

  bool equals_null_safe(const value& o) const {
    if (is_null() && o.is_null()) return true;
    if (is_null() || o.is_null()) return false;
    return equals_non_null(o);
  }

  // Total order over two non-null values of comparable kinds: -1, 0, +1.
  int compare(const value& o) const {
    if (is_numeric() && o.is_numeric()) {
      if (kind_ == kind::i64 && o.kind_ == kind::i64) {
        int64_t a = as_i64(), b = o.as_i64();
        return a < b ? -1 : (a > b ? 1 : 0);
      }
      double a = numeric(), b = o.numeric();
      return a < b ? -1 : (a > b ? 1 : 0);
    }
    if (kind_ != o.kind_) {
      raise(errc::type_error,
            "cannot compare " + type_name() + " with " + o.type_name());
    }
    switch (kind_) {
      case kind::boolean: {
        int a = as_bool() ? 1 : 0, b = o.as_bool() ? 1 : 0;
        return a - b;
      }
      case kind::str:
      case kind::bytes: {
        int c = as_str().compare(o.as_str());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
      }
      case kind::timestamp:
      case kind::date: {
        int64_t a = std::get<int64_t>(data_), b = std::get<int64_t>(o.data_);
        return a < b ? -1 : (a > b ? 1 : 0);
      }
      case kind::decimal: {
        // Compare via doubles; exactness matters only for display.
        double a = decimal_to_double(as_decimal()), b = decimal_to_double(o.as_decimal());
        return a < b ? -1 : (a > b ? 1 : 0);
      }
      default:
        raise(errc::type_error, "cannot compare " + type_name());
    }
  }

  size_t hash() const {
    size_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    switch (kind_) {
      case kind::null:
        mix(0);
        break;
      case kind::boolean:
        mix(as_bool() ? 2 : 1);
        break;
      case kind::i64:
        mix(static_cast<uint64_t>(as_i64()));
        break;
      case kind::f64: {
        double d = as_f64();
        if (d == std::floor(d) && std::abs(d) < 9.2e18) {
          mix(static_cast<uint64_t>(static_cast<int64_t>(d)));  // match i64 hashing
        } else {
          uint64_t bits;
          std::memcpy(&bits, &d, 8);
          mix(bits);
        }
        break;
      }
      case kind::str:
      case kind::bytes:
        for (char c : as_str()) mix(static_cast<uint8_t>(c));
        break;
      case kind::timestamp:
      case kind::date:
        mix(static_cast<uint64_t>(std::get<int64_t>(data_)));
        break;
      case kind::decimal:
        mix(static_cast<uint64_t>(as_decimal().unscaled));
        mix(static_cast<uint64_t>(as_decimal().scale));
        break;
      case kind::list:
        for (const auto& v : as_list()) mix(v.hash());
        break;
      case kind::strct:
        for (const auto& [k, v] : as_struct()) {
          for (char c : k) mix(static_cast<uint8_t>(c));
          mix(v.hash());
        }
        break;
    }
    return h;
  }

  nlohmann::json to_json() const {
    switch (kind_) {
      case kind::null: return nullptr;
      case kind::boolean: return as_bool();
      case kind::i64: return as_i64();
      case kind::f64: return as_f64();
      case kind::str: return as_str();
      case kind::bytes: return hex_encode(as_str());
      case kind::timestamp: return std::get<int64_t>(data_);
      case kind::date: return date_iso(static_cast<int32_t>(std::get<int64_t>(data_)));
      case kind::decimal: return decimal_string(as_decimal());
      case kind::list: {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : as_list()) arr.push_back(v.to_json());
        return arr;
      }
      case kind::strct: {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [k, v] : as_struct()) obj[k] = v.to_json();
        return obj;
      }
    }
    return nullptr;
  }

  static value from_json(const nlohmann::json& j) {
    if (j.is_null()) return null();
    if (j.is_boolean()) return boolean(j.get<bool>());
    if (j.is_number_integer()) return i64(j.get<int64_t>());
    if (j.is_number_unsigned()) return i64(static_cast<int64_t>(j.get<uint64_t>()));
    if (j.is_number_float()) return f64(j.get<double>());
    if (j.is_string()) return str(j.get<std::string>());
    if (j.is_array()) {
      list_t items;
      for (const auto& e : j) items.push_back(from_json(e));
      return list(std::move(items));
    }
    if (j.is_object()) {
      struct_t fields;
      for (auto it = j.begin(); it != j.end(); ++it) {
        fields.emplace_back(it.key(), from_json(it.value()));
      }
      return strct(std::move(fields));
    }
    return null();
  }

  // Display form for the CLI table output.
  std::string to_display() const {
    if (kind_ == kind::str) return as_str();
    if (kind_ == kind::null) return "NULL";
    return to_json().dump();
  }

  static std::string hex_encode(const std::string& raw) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(raw.size() * 2);
    for (unsigned char c : raw) {
      out.push_back(digits[c >> 4]);
      out.push_back(digits[c & 0xF]);
    }
    return out;
  }

  static std::string decimal_string(const decimal_t& d) {
    bool neg = d.unscaled < 0;
    // Avoid overflow on INT64_MIN by composing digits from unsigned.
    uint64_t mag = neg ? (~static_cast<uint64_t>(d.unscaled) + 1)
                       : static_cast<uint64_t>(d.unscaled);
    std::string digits = std::to_string(mag);
    std::string out;
    if (d.scale <= 0) {
      out = digits;
      for (int i = 0; i < -d.scale; ++i) out.push_back('0');
    } else {
      if (digits.size() <= static_cast<size_t>(d.scale)) {
        digits.insert(0, static_cast<size_t>(d.scale) + 1 - digits.size(), '0');
      }
      out = digits.substr(0, digits.size() - d.scale) + "." +
            digits.substr(digits.size() - d.scale);
    }
    return neg ? "-" + out : out;
  }

  static std::string date_iso(int32_t days_since_epoch) {
    // Civil-from-days (Howard Hinnant's algorithm).
    int64_t z = days_since_epoch + 719468;
    int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    uint64_t doe = static_cast<uint64_t>(z - era * 146097);
    uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int64_t y = static_cast<int64_t>(yoe) + era * 400;
    uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    uint64_t mp = (5 * doy + 2) / 153;
    uint64_t d = doy - (153 * mp + 2) / 5 + 1;
    uint64_t m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) y += 1;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02llu-%02llu",
                  static_cast<long long>(y), static_cast<unsigned long long>(m),
                  static_cast<unsigned long long>(d));
    return buf;
  }

 private:
  using storage =
      std::variant<std::monostate, bool, int64_t, double, std::string, decimal_t,
                   list_t, struct_t>;

  template <typename T>
  value(kind k, T&& v) : kind_(k), data_(std::forward<T>(v)) {}

  static double decimal_to_double(const decimal_t& d) {
    return static_cast<double>(d.unscaled) * std::pow(10.0, -d.scale);
  }

  bool equals_non_null(const value& o) const {
    if (is_numeric() && o.is_numeric()) {
      if (kind_ == kind::i64 && o.kind_ == kind::i64) return as_i64() == o.as_i64();
      return numeric() == o.numeric();
    }
    if (kind_ != o.kind_) return false;
    switch (kind_) {
      case kind::boolean: return as_bool() == o.as_bool();
      case kind::str:
      case kind::bytes: return as_str() == o.as_str();
      case kind::timestamp:
      case kind::date: return std::get<int64_t>(data_) == std::get<int64_t>(o.data_);
      case kind::decimal: return as_decimal() == o.as_decimal();
      case kind::list: {
        const auto& a = as_list();
        const auto& b = o.as_list();
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i) {
          if (!a[i].equals_null_safe(b[i])) return false;
        }
        return true;
      }
      case kind::strct: {
        const auto& a = as_struct();
        const auto& b = o.as_struct();
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i) {
          if (a[i].first != b[i].first) return false;
          if (!a[i].second.equals_null_safe(b[i].second)) return false;
        }
        return true;
      }
      default: return false;
    }
  }

  kind kind_;
  storage data_;
};

}  // namespace rill
