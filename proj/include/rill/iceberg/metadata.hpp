#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rill/common.hpp"
#include "rill/io/open.hpp"

namespace rill::iceberg {

struct schema_field {
  int id = 0;
  std::string name;
  bool required = false;
  nlohmann::json type;  // primitive name string or nested type object
};

struct table_schema {
  int schema_id = 0;
  std::vector<schema_field> fields;

  const schema_field* find_by_id(int id) const {
    for (const auto& f : fields) {
      if (f.id == id) return &f;
    }
    return nullptr;
  }
};

struct snapshot_info {
  int64_t snapshot_id = 0;
  int64_t sequence_number = 0;
  std::string manifest_list;
  std::optional<int> schema_id;
};

struct partition_field {
  int source_id = 0;
  std::string name;
  std::string transform;
};

struct table_metadata {
  int format_version = 0;
  std::string table_uuid;
  std::string location;
  std::optional<int64_t> current_snapshot_id;
  std::vector<snapshot_info> snapshots;
  std::map<int, table_schema> schemas;
  int current_schema_id = 0;
  std::map<int, std::vector<partition_field>> partition_specs;

  // Directory that actually holds the metadata file; lets committed fixture
  // tables resolve `location`-relative paths after the tree is relocated.
  std::string resolved_root;

  const snapshot_info* find_snapshot(int64_t id) const {
    for (const auto& s : snapshots) {
      if (s.snapshot_id == id) return &s;
    }
    return nullptr;
  }

  const table_schema& schema_for(const snapshot_info& snap) const {
    int sid = snap.schema_id.value_or(current_schema_id);
    auto it = schemas.find(sid);
    if (it == schemas.end()) {
      auto cur = schemas.find(current_schema_id);
      if (cur == schemas.end()) {
        raise(errc::metadata_corrupt, "no schema for snapshot");
      }
      return cur->second;
    }
    return it->second;
  }

  // Paths inside manifests usually start with `location`; rebase those onto
  // the tree the metadata file actually lives in.
  std::string resolve_path(const std::string& path) const {
    if (!location.empty() && path.rfind(location, 0) == 0 &&
        !resolved_root.empty()) {
      std::string suffix = path.substr(location.size());
      if (!suffix.empty() && suffix.front() == '/') suffix.erase(0, 1);
      return resolved_root + "/" + suffix;
    }
    return path;
  }
};

namespace detail {

inline table_schema parse_schema(const nlohmann::json& js) {
  table_schema out;
  out.schema_id = js.value("schema-id", 0);
  if (!js.contains("fields") || !js["fields"].is_array()) {
    raise(errc::metadata_corrupt, "schema without fields");
  }
  for (const auto& f : js["fields"]) {
    schema_field sf;
    sf.id = f.at("id").get<int>();
    sf.name = f.at("name").get<std::string>();
    sf.required = f.value("required", false);
    sf.type = f.at("type");
    out.fields.push_back(std::move(sf));
  }
  return out;
}

}  // namespace detail

// `uri` points at the table's metadata JSON document. One metadata_json fetch.
inline table_metadata load_table_metadata(const std::string& uri,
                                          const io::source_opener& open) {
  auto src = open(uri);
  uint64_t len = src->length();
  if (len == 0) raise(errc::metadata_corrupt, uri + ": empty metadata file");
  byte_buffer body = src->read_range({0, len}, io::fetch_purpose::metadata_json);

  nlohmann::json js;
  try {
    js = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    raise(errc::metadata_corrupt, uri + ": " + e.what());
  }

  table_metadata meta;
  if (!js.contains("format-version") || !js["format-version"].is_number_integer()) {
    raise(errc::metadata_corrupt, uri + ": missing format-version");
  }
  meta.format_version = js["format-version"].get<int>();
  if (meta.format_version != 2) {
    raise(errc::unsupported_format_version,
          "iceberg format-version " + std::to_string(meta.format_version) +
              " (only v2 is supported)");
  }
  try {
    meta.table_uuid = js.value("table-uuid", "");
    meta.location = js.value("location", "");
    if (js.contains("current-snapshot-id") && !js["current-snapshot-id"].is_null()) {
      int64_t cur = js["current-snapshot-id"].get<int64_t>();
      if (cur != -1) meta.current_snapshot_id = cur;
    }
    for (const auto& s : js.value("snapshots", nlohmann::json::array())) {
      snapshot_info snap;
      snap.snapshot_id = s.at("snapshot-id").get<int64_t>();
      snap.sequence_number = s.value("sequence-number", int64_t{0});
      snap.manifest_list = s.at("manifest-list").get<std::string>();
      if (s.contains("schema-id")) snap.schema_id = s["schema-id"].get<int>();
      meta.snapshots.push_back(std::move(snap));
    }
    meta.current_schema_id = js.value("current-schema-id", 0);
    if (js.contains("schemas")) {
      for (const auto& sj : js["schemas"]) {
        auto sch = detail::parse_schema(sj);
        meta.schemas[sch.schema_id] = std::move(sch);
      }
    } else if (js.contains("schema")) {  // some writers inline a single schema
      auto sch = detail::parse_schema(js["schema"]);
      meta.schemas[sch.schema_id] = std::move(sch);
      meta.current_schema_id = sch.schema_id;
    }
    for (const auto& spec : js.value("partition-specs", nlohmann::json::array())) {
      int spec_id = spec.value("spec-id", 0);
      std::vector<partition_field> fields;
      for (const auto& f : spec.value("fields", nlohmann::json::array())) {
        partition_field pf;
        pf.source_id = f.value("source-id", 0);
        pf.name = f.value("name", "");
        pf.transform = f.value("transform", "");
        fields.push_back(std::move(pf));
      }
      meta.partition_specs[spec_id] = std::move(fields);
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::metadata_corrupt, uri + ": " + e.what());
  }

  if (meta.current_snapshot_id &&
      !meta.find_snapshot(*meta.current_snapshot_id)) {
    raise(errc::metadata_corrupt, "current-snapshot-id not in snapshot list");
  }
  if (meta.schemas.empty()) {
    raise(errc::metadata_corrupt, uri + ": no schemas");
  }

  // metadata file lives in <root>/metadata/<file>; root anchors relative reads
  std::string dir = uri.substr(0, uri.find_last_of('/') == std::string::npos
                                      ? 0
                                      : uri.find_last_of('/'));
  if (dir.size() >= 9 && dir.compare(dir.size() - 9, 9, "/metadata") == 0) {
    meta.resolved_root = dir.substr(0, dir.size() - 9);
  } else {
    meta.resolved_root = dir;
  }
  return meta;
}

struct current_snapshot_t {};
inline constexpr current_snapshot_t current_snapshot{};

inline const snapshot_info& resolve_snapshot(const table_metadata& meta,
                                             current_snapshot_t) {
  if (!meta.current_snapshot_id) {
    raise(errc::no_current_snapshot, "table has no current snapshot");
  }
  return *meta.find_snapshot(*meta.current_snapshot_id);
}

inline const snapshot_info& resolve_snapshot(const table_metadata& meta, int64_t id) {
  const snapshot_info* s = meta.find_snapshot(id);
  if (!s) {
    raise(errc::unknown_snapshot_id, "no snapshot with id " + std::to_string(id));
  }
  return *s;
}

}  // namespace rill::iceberg
