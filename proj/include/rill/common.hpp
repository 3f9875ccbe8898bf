#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rill {

// Byte buffers are std::string throughout: cheap substr/string_view slicing
// and direct interop with the vendored JSON/HTTP headers.
using byte_buffer = std::string;

enum class errc {
  // remote-io
  range_out_of_bounds,
  transport,
  empty_file,
  // parquet
  not_parquet,
  footer_corrupt,
  unsupported_feature,
  unsupported_encoding,
  unsupported_codec,
  page_corrupt,
  unknown_column,
  level_mismatch,
  // iceberg
  unsupported_format_version,
  metadata_corrupt,
  no_current_snapshot,
  unknown_snapshot_id,
  manifest_corrupt,
  unsupported_avro_feature,
  delete_file_corrupt,
  // sql
  syntax_error,
  bind_error,
  unknown_table,
  unknown_function,
  duplicate_name,
  type_error,
  resource_exceeded,
  udf_failed,
  cancelled,
};

inline std::string_view errc_name(errc c) {
  switch (c) {
    case errc::range_out_of_bounds: return "RangeOutOfBounds";
    case errc::transport: return "TransportError";
    case errc::empty_file: return "EmptyFile";
    case errc::not_parquet: return "NotParquet";
    case errc::footer_corrupt: return "FooterCorrupt";
    case errc::unsupported_feature: return "UnsupportedFeature";
    case errc::unsupported_encoding: return "UnsupportedEncoding";
    case errc::unsupported_codec: return "UnsupportedCodec";
    case errc::page_corrupt: return "PageCorrupt";
    case errc::unknown_column: return "UnknownColumn";
    case errc::level_mismatch: return "LevelMismatch";
    case errc::unsupported_format_version: return "UnsupportedFormatVersion";
    case errc::metadata_corrupt: return "MetadataCorrupt";
    case errc::no_current_snapshot: return "NoCurrentSnapshot";
    case errc::unknown_snapshot_id: return "UnknownSnapshotId";
    case errc::manifest_corrupt: return "ManifestCorrupt";
    case errc::unsupported_avro_feature: return "UnsupportedAvroFeature";
    case errc::delete_file_corrupt: return "DeleteFileCorrupt";
    case errc::syntax_error: return "SyntaxError";
    case errc::bind_error: return "BindError";
    case errc::unknown_table: return "UnknownTable";
    case errc::unknown_function: return "UnknownFunction";
    case errc::duplicate_name: return "DuplicateName";
    case errc::type_error: return "TypeError";
    case errc::resource_exceeded: return "ResourceExceeded";
    case errc::udf_failed: return "UdfFailed";
    case errc::cancelled: return "Cancelled";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw error(code, message);
}

}  // namespace rill
