#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <vector>

#include "rill/common.hpp"

namespace rill::parquet {

// LSB-first bit unpacking, as used by RLE bit-packed runs, PLAIN booleans,
// and dictionary indices.
class bit_reader {
 public:
  explicit bit_reader(std::string_view data)
      : p_(reinterpret_cast<const uint8_t*>(data.data())), size_(data.size()) {}

  uint32_t read(int bit_width) {
    uint64_t out = 0;
    int got = 0;
    while (got < bit_width) {
      size_t byte_index = bit_pos_ >> 3;
      if (byte_index >= size_) raise(errc::page_corrupt, "bit reader: out of data");
      int bit_in_byte = static_cast<int>(bit_pos_ & 7);
      int take = std::min(8 - bit_in_byte, bit_width - got);
      uint32_t bits = (p_[byte_index] >> bit_in_byte) & ((1u << take) - 1);
      out |= static_cast<uint64_t>(bits) << got;
      got += take;
      bit_pos_ += take;
    }
    return static_cast<uint32_t>(out);
  }

 private:
  const uint8_t* p_;
  size_t size_;
  size_t bit_pos_ = 0;
};

// RLE/bit-packed hybrid: varint header, LSB set selects a bit-packed run of
// (header >> 1) * 8 values, otherwise an RLE run of (header >> 1) copies.
inline std::vector<uint32_t> decode_rle_hybrid(std::string_view data, int bit_width,
                                               size_t count) {
  std::vector<uint32_t> out;
  out.reserve(count);
  if (bit_width == 0) {
    out.assign(count, 0);
    return out;
  }
  const uint8_t* p = reinterpret_cast<const uint8_t*>(data.data());
  const uint8_t* end = p + data.size();
  auto varint = [&]() -> uint64_t {
    uint64_t v = 0;
    int shift = 0;
    for (;;) {
      if (p >= end) raise(errc::page_corrupt, "rle: truncated varint");
      uint8_t b = *p++;
      v |= static_cast<uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return v;
      shift += 7;
      if (shift > 63) raise(errc::page_corrupt, "rle: varint overflow");
    }
  };
  int byte_width = (bit_width + 7) / 8;
  while (out.size() < count) {
    uint64_t header = varint();
    if (header & 1) {
      uint64_t groups = header >> 1;
      uint64_t values = groups * 8;
      uint64_t bytes = groups * bit_width;
      if (static_cast<uint64_t>(end - p) < bytes) {
        raise(errc::page_corrupt, "rle: truncated bit-packed run");
      }
      bit_reader bits(std::string_view(reinterpret_cast<const char*>(p), bytes));
      for (uint64_t i = 0; i < values && out.size() < count; ++i) {
        out.push_back(bits.read(bit_width));
      }
      p += bytes;
    } else {
      uint64_t repeats = header >> 1;
      if (static_cast<uint64_t>(end - p) < static_cast<uint64_t>(byte_width)) {
        raise(errc::page_corrupt, "rle: truncated run value");
      }
      uint32_t v = 0;
      std::memcpy(&v, p, byte_width);
      p += byte_width;
      for (uint64_t i = 0; i < repeats && out.size() < count; ++i) out.push_back(v);
    }
  }
  return out;
}

inline int bit_width_for(uint32_t max_value) {
  int w = 0;
  while (max_value > 0) {
    ++w;
    max_value >>= 1;
  }
  return w;
}

}  // namespace rill::parquet
