#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include <zlib.h>

#include "rill/common.hpp"
#include "rill/parquet/format.hpp"

// zstd and snappy ship here as runtime libraries without development headers;
// these are their long-stable one-shot C entry points.
extern "C" {
size_t ZSTD_decompress(void* dst, size_t dst_capacity, const void* src, size_t src_size);
unsigned ZSTD_isError(size_t code);
unsigned long long ZSTD_getFrameContentSize(const void* src, size_t src_size);

typedef enum {
  RILL_SNAPPY_OK = 0,
  RILL_SNAPPY_INVALID_INPUT = 1,
  RILL_SNAPPY_BUFFER_TOO_SMALL = 2,
} rill_snappy_status;
rill_snappy_status snappy_uncompress(const char* compressed, size_t compressed_length,
                                     char* uncompressed, size_t* uncompressed_length);
rill_snappy_status snappy_uncompressed_length(const char* compressed, size_t n,
                                              size_t* result);
rill_snappy_status snappy_compress(const char* input, size_t input_length,
                                   char* compressed, size_t* compressed_length);
size_t snappy_max_compressed_length(size_t source_length);
}

namespace rill::parquet {

namespace detail {

inline byte_buffer zlib_inflate(std::string_view in, size_t out_size, int window_bits) {
  byte_buffer out(out_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) {
    raise(errc::page_corrupt, "zlib init failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != out_size) {
    raise(errc::page_corrupt, "deflate stream decode failed");
  }
  return out;
}

}  // namespace detail

inline byte_buffer gunzip(std::string_view in, size_t out_size) {
  return detail::zlib_inflate(in, out_size, 16 + MAX_WBITS);
}

// Raw deflate, no zlib/gzip framing (Avro's "deflate" codec).
inline byte_buffer inflate_raw(std::string_view in, size_t out_size) {
  return detail::zlib_inflate(in, out_size, -MAX_WBITS);
}

// Raw deflate when the produced size is not known up front (Avro blocks).
inline byte_buffer inflate_raw_unknown(std::string_view in) {
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    raise(errc::page_corrupt, "zlib init failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  byte_buffer out(std::max<size_t>(in.size() * 4, 4096), '\0');
  size_t written = 0;
  for (;;) {
    zs.next_out = reinterpret_cast<Bytef*>(out.data() + written);
    zs.avail_out = static_cast<uInt>(out.size() - written);
    int rc = inflate(&zs, Z_NO_FLUSH);
    written = zs.total_out;
    if (rc == Z_STREAM_END) break;
    if (rc == Z_OK || rc == Z_BUF_ERROR) {
      if (written == out.size()) {
        out.resize(out.size() * 2);
        continue;
      }
      if (zs.avail_in == 0) {
        inflateEnd(&zs);
        raise(errc::page_corrupt, "deflate stream truncated");
      }
      continue;
    }
    inflateEnd(&zs);
    raise(errc::page_corrupt, "deflate stream decode failed");
  }
  inflateEnd(&zs);
  out.resize(written);
  return out;
}

inline byte_buffer snappy_decode(std::string_view in, size_t expected_size) {
  size_t n = 0;
  if (snappy_uncompressed_length(in.data(), in.size(), &n) != RILL_SNAPPY_OK) {
    raise(errc::page_corrupt, "snappy: bad preamble");
  }
  if (n != expected_size) {
    raise(errc::page_corrupt, "snappy: size mismatch");
  }
  byte_buffer out(n, '\0');
  size_t out_len = n;
  if (snappy_uncompress(in.data(), in.size(), out.data(), &out_len) != RILL_SNAPPY_OK ||
      out_len != n) {
    raise(errc::page_corrupt, "snappy: decode failed");
  }
  return out;
}

inline byte_buffer snappy_encode(std::string_view in) {
  byte_buffer out(snappy_max_compressed_length(in.size()), '\0');
  size_t out_len = out.size();
  if (snappy_compress(in.data(), in.size(), out.data(), &out_len) != RILL_SNAPPY_OK) {
    raise(errc::page_corrupt, "snappy: encode failed");
  }
  out.resize(out_len);
  return out;
}

inline byte_buffer zstd_decode(std::string_view in, size_t expected_size) {
  byte_buffer out(expected_size, '\0');
  size_t rc = ZSTD_decompress(out.data(), out.size(), in.data(), in.size());
  if (ZSTD_isError(rc) || rc != expected_size) {
    raise(errc::page_corrupt, "zstd: decode failed");
  }
  return out;
}

// Decompress one page body. `expected_size` comes from the page header.
inline byte_buffer decompress(compression_codec codec, std::string_view in,
                              size_t expected_size) {
  switch (codec) {
    case compression_codec::uncompressed:
      if (in.size() != expected_size) raise(errc::page_corrupt, "page size mismatch");
      return byte_buffer(in);
    case compression_codec::snappy:
      return snappy_decode(in, expected_size);
    case compression_codec::gzip:
      return gunzip(in, expected_size);
    case compression_codec::zstd:
      return zstd_decode(in, expected_size);
    default:
      raise(errc::unsupported_codec, std::string(codec_name(codec)));
  }
}

}  // namespace rill::parquet
