#pragma once

// Thrift compact protocol, the subset the Parquet footer and page headers
// use: varint/zigzag ints, binary, lists, nested structs, bool fields.

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rill/common.hpp"

namespace rill::parquet::thrift {

enum compact_type : uint8_t {
  ct_stop = 0,
  ct_bool_true = 1,
  ct_bool_false = 2,
  ct_i8 = 3,
  ct_i16 = 4,
  ct_i32 = 5,
  ct_i64 = 6,
  ct_double = 7,
  ct_binary = 8,
  ct_list = 9,
  ct_set = 10,
  ct_map = 11,
  ct_struct = 12,
};

struct field_info {
  int16_t id = 0;
  uint8_t type = ct_stop;
  bool bool_value = false;  // set when type is a bool field
};

class compact_reader {
 public:
  explicit compact_reader(std::string_view data)
      : begin_(reinterpret_cast<const uint8_t*>(data.data())),
        p_(begin_), end_(begin_ + data.size()) {}

  size_t offset() const { return static_cast<size_t>(p_ - begin_); }
  bool at_end() const { return p_ >= end_; }

  void begin_struct() {
    field_stack_.push_back(last_field_);
    last_field_ = 0;
  }

  void end_struct() {
    last_field_ = field_stack_.back();
    field_stack_.pop_back();
  }

  // Returns false at the stop byte (and consumes it).
  bool next_field(field_info& f) {
    uint8_t byte = read_byte();
    if (byte == ct_stop) return false;
    uint8_t type = byte & 0x0F;
    uint8_t delta = byte >> 4;
    if (delta != 0) {
      last_field_ = static_cast<int16_t>(last_field_ + delta);
    } else {
      last_field_ = static_cast<int16_t>(read_zigzag64());
    }
    f.id = last_field_;
    f.type = type;
    if (type == ct_bool_true) f.bool_value = true;
    if (type == ct_bool_false) f.bool_value = false;
    return true;
  }

  int32_t read_i32() { return static_cast<int32_t>(read_zigzag64()); }
  int64_t read_i64() { return read_zigzag64(); }
  int8_t read_i8() { return static_cast<int8_t>(read_byte()); }

  double read_double() {
    need(8);
    uint64_t bits = 0;
    std::memcpy(&bits, p_, 8);  // compact protocol doubles are little-endian
    p_ += 8;
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }

  std::string_view read_binary() {
    uint64_t len = read_varint();
    need(len);
    std::string_view out(reinterpret_cast<const char*>(p_), len);
    p_ += len;
    return out;
  }

  // (element type, count)
  std::pair<uint8_t, uint32_t> read_list_header() {
    uint8_t byte = read_byte();
    uint8_t type = byte & 0x0F;
    uint32_t count = byte >> 4;
    if (count == 15) count = static_cast<uint32_t>(read_varint());
    return {type, count};
  }

  void skip(uint8_t type) {
    switch (type) {
      case ct_bool_true:
      case ct_bool_false:
        return;  // value encoded in the field header
      case ct_i8:
        read_byte();
        return;
      case ct_i16:
      case ct_i32:
      case ct_i64:
        read_varint();
        return;
      case ct_double:
        need(8);
        p_ += 8;
        return;
      case ct_binary:
        read_binary();
        return;
      case ct_list:
      case ct_set: {
        auto [elem, count] = read_list_header();
        for (uint32_t i = 0; i < count; ++i) skip_element(elem);
        return;
      }
      case ct_map: {
        uint64_t count = read_varint();
        if (count == 0) return;
        uint8_t kv = read_byte();
        for (uint64_t i = 0; i < count; ++i) {
          skip_element(kv >> 4);
          skip_element(kv & 0x0F);
        }
        return;
      }
      case ct_struct: {
        begin_struct();
        field_info f;
        while (next_field(f)) skip(f.type);
        end_struct();
        return;
      }
      default:
        raise(errc::footer_corrupt, "thrift: unknown type " + std::to_string(type));
    }
  }

  uint64_t read_varint() {
    uint64_t out = 0;
    int shift = 0;
    for (;;) {
      uint8_t b = read_byte();
      out |= static_cast<uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return out;
      shift += 7;
      if (shift > 63) raise(errc::footer_corrupt, "thrift: varint overflow");
    }
  }

 private:
  // List element bools are one byte, unlike field bools.
  void skip_element(uint8_t type) {
    if (type == ct_bool_true || type == ct_bool_false) {
      read_byte();
      return;
    }
    skip(type);
  }

  int64_t read_zigzag64() {
    uint64_t u = read_varint();
    return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
  }

  uint8_t read_byte() {
    need(1);
    return *p_++;
  }

  void need(uint64_t n) const {
    if (static_cast<uint64_t>(end_ - p_) < n) {
      raise(errc::footer_corrupt, "thrift: truncated input");
    }
  }

  const uint8_t* begin_;
  const uint8_t* p_;
  const uint8_t* end_;
  std::vector<int16_t> field_stack_;
  int16_t last_field_ = 0;
};

class compact_writer {
 public:
  const std::string& buffer() const { return out_; }
  std::string take() { return std::move(out_); }

  void begin_struct() {
    field_stack_.push_back(last_field_);
    last_field_ = 0;
  }

  void end_struct() {
    out_.push_back(static_cast<char>(ct_stop));
    last_field_ = field_stack_.back();
    field_stack_.pop_back();
  }

  void field_bool(int16_t id, bool v) { field_header(id, v ? ct_bool_true : ct_bool_false); }

  void field_i32(int16_t id, int32_t v) {
    field_header(id, ct_i32);
    write_zigzag(v);
  }

  void field_i64(int16_t id, int64_t v) {
    field_header(id, ct_i64);
    write_zigzag(v);
  }

  void field_binary(int16_t id, std::string_view v) {
    field_header(id, ct_binary);
    write_varint(v.size());
    out_.append(v.data(), v.size());
  }

  void field_list(int16_t id, uint8_t elem_type, uint32_t count) {
    field_header(id, ct_list);
    if (count < 15) {
      out_.push_back(static_cast<char>((count << 4) | elem_type));
    } else {
      out_.push_back(static_cast<char>(0xF0 | elem_type));
      write_varint(count);
    }
  }

  void field_struct(int16_t id) {
    field_header(id, ct_struct);
    begin_struct();
  }

  // list elements
  void elem_i32(int32_t v) { write_zigzag(v); }
  void elem_i64(int64_t v) { write_zigzag(v); }
  void elem_binary(std::string_view v) {
    write_varint(v.size());
    out_.append(v.data(), v.size());
  }
  void elem_struct_begin() { begin_struct(); }
  void elem_struct_end() {
    out_.push_back(static_cast<char>(ct_stop));
    last_field_ = field_stack_.back();
    field_stack_.pop_back();
  }

 private:
  void field_header(int16_t id, uint8_t type) {
    int delta = id - last_field_;
    if (delta > 0 && delta <= 15) {
      out_.push_back(static_cast<char>((delta << 4) | type));
    } else {
      out_.push_back(static_cast<char>(type));
      write_zigzag(id);
    }
    last_field_ = id;
  }

  void write_varint(uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<char>((v & 0x7F) | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<char>(v));
  }

  void write_zigzag(int64_t v) {
    write_varint((static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63));
  }

  std::string out_;
  std::vector<int16_t> field_stack_;
  int16_t last_field_ = 0;
};

}  // namespace rill::parquet::thrift
