#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "rill/parquet/levels.hpp"

using rill::parquet::bit_reader;
using rill::parquet::bit_width_for;
using rill::parquet::decode_rle_hybrid;

namespace {

void put_varint(std::string& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

// RLE run: count then one little-endian value of ceil(bw/8) bytes.
void put_rle_run(std::string& out, int bw, uint64_t count, uint32_t v) {
  put_varint(out, count << 1);
  for (int b = 0; b < (bw + 7) / 8; ++b) {
    out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
  }
}

// Bit-packed groups of 8 values, LSB-first. `vals` must be a multiple of 8.
void put_packed(std::string& out, int bw, const std::vector<uint32_t>& vals) {
  put_varint(out, ((vals.size() / 8) << 1) | 1);
  uint64_t acc = 0;
  int nbits = 0;
  for (uint32_t v : vals) {
    acc |= static_cast<uint64_t>(v) << nbits;
    nbits += bw;
    while (nbits >= 8) {
      out.push_back(static_cast<char>(acc & 0xFF));
      acc >>= 8;
      nbits -= 8;
    }
  }
  if (nbits > 0) out.push_back(static_cast<char>(acc & 0xFF));
}

}  // namespace

TEST_CASE("bit_width_for") {
  CHECK(bit_width_for(0) == 0);
  CHECK(bit_width_for(1) == 1);
  CHECK(bit_width_for(2) == 2);
  CHECK(bit_width_for(3) == 2);
  CHECK(bit_width_for(7) == 3);
  CHECK(bit_width_for(8) == 4);
  CHECK(bit_width_for(255) == 8);
  CHECK(bit_width_for(256) == 9);
}

TEST_CASE("bit_reader reads LSB-first") {
  std::string data;
  data.push_back(static_cast<char>(0b10110101));
  data.push_back(static_cast<char>(0b00000011));
  bit_reader r(data);
  CHECK(r.read(1) == 1);
  CHECK(r.read(2) == 0b10);
  CHECK(r.read(3) == 0b110);
  CHECK(r.read(4) == 0b1110);  // crosses the byte boundary
}

TEST_CASE("rle: single run") {
  std::string data;
  put_rle_run(data, 1, 10, 1);
  auto out = decode_rle_hybrid(data, 1, 10);
  REQUIRE(out.size() == 10);
  for (uint32_t v : out) CHECK(v == 1);
}

TEST_CASE("rle: two-byte values") {
  std::string data;
  put_rle_run(data, 12, 3, 0x5A5);
  auto out = decode_rle_hybrid(data, 12, 3);
  REQUIRE(out == std::vector<uint32_t>{0x5A5, 0x5A5, 0x5A5});
}

TEST_CASE("bit-packed group") {
  std::vector<uint32_t> vals{0, 1, 2, 3, 4, 5, 6, 7};
  std::string data;
  put_packed(data, 3, vals);
  auto out = decode_rle_hybrid(data, 3, 8);
  CHECK(out == vals);
}

TEST_CASE("bit-packed: trailing values beyond count are dropped") {
  // 8-value group but only 5 requested
  std::vector<uint32_t> vals{1, 0, 1, 1, 0, 1, 1, 1};
  std::string data;
  put_packed(data, 1, vals);
  auto out = decode_rle_hybrid(data, 1, 5);
  CHECK(out == std::vector<uint32_t>{1, 0, 1, 1, 0});
}

TEST_CASE("mixed rle and bit-packed runs") {
  std::string data;
  put_rle_run(data, 2, 4, 3);
  put_packed(data, 2, {0, 1, 2, 3, 3, 2, 1, 0});
  put_rle_run(data, 2, 2, 0);
  auto out = decode_rle_hybrid(data, 2, 14);
  CHECK(out == std::vector<uint32_t>{3, 3, 3, 3, 0, 1, 2, 3, 3, 2, 1, 0, 0, 0});
}

TEST_CASE("bit width zero yields zeros without consuming bytes") {
  auto out = decode_rle_hybrid({}, 0, 6);
  CHECK(out == std::vector<uint32_t>(6, 0));
}

TEST_CASE("truncated runs are rejected") {
  std::string data;
  put_rle_run(data, 8, 100, 7);
  data.pop_back();  // drop the run value
  CHECK_THROWS_AS(decode_rle_hybrid(data, 8, 100), rill::error);

  std::string packed;
  put_packed(packed, 4, {1, 2, 3, 4, 5, 6, 7, 8});
  packed.resize(packed.size() - 2);
  CHECK_THROWS_AS(decode_rle_hybrid(packed, 4, 8), rill::error);
}
