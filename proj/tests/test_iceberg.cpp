#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rill/iceberg/metadata.hpp"
#include "rill/iceberg/scan.hpp"
#include "rill/io/open.hpp"

using namespace rill;
using nlohmann::json;

namespace {

std::string fixture_dir() {
  if (const char* env = std::getenv("RILL_FIXTURES")) return env;
  return RILL_FIXTURE_DIR;
}

errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const error& e) {
    return e.code();
  }
  FAIL("expected a rill::error");
  return errc::transport;
}

struct table_fixture {
  std::string root;
  json oracle;
  io::fetch_log_ptr log = std::make_shared<io::fetch_log>();
  io::source_opener open{nullptr, log};

  explicit table_fixture(const std::string& name) {
    root = fixture_dir() + "/iceberg/" + name;
    std::ifstream in(root + "/oracle.json");
    REQUIRE(in.good());
    oracle = json::parse(in);
  }

  std::string metadata_path() const {
    return root + "/" + oracle.at("metadata").get<std::string>();
  }

  iceberg::table_metadata load() const {
    return iceberg::load_table_metadata(metadata_path(), open);
  }
};

json rows_to_json(const std::vector<std::vector<value>>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v.to_json());
    out.push_back(std::move(r));
  }
  return out;
}

json partition_to_json(const value::struct_t& partition) {
  json out = json::object();
  for (const auto& [name, v] : partition) out[name] = v.to_json();
  return out;
}

const std::vector<std::string> k_tables = {
    "plain", "posdel", "eqdel", "mixed", "monotone", "seq_equal", "partitioned",
    "removed",
};

}  // namespace

TEST_CASE("table metadata loads with one metadata_json fetch") {
  table_fixture fx("plain");
  auto meta = fx.load();
  CHECK(meta.format_version == 2);
  CHECK(meta.location == "rill://warehouse/plain");
  REQUIRE(meta.current_snapshot_id.has_value());
  CHECK(*meta.current_snapshot_id == fx.oracle.at("current_snapshot_id").get<int64_t>());
  CHECK(meta.snapshots.size() == fx.oracle.at("snapshots").size());
  CHECK(fx.log->count(io::fetch_purpose::metadata_json) == 1);
  CHECK(fx.log->size() == 1);

  const auto& schema = meta.schema_for(iceberg::resolve_snapshot(meta, iceberg::current_snapshot));
  std::vector<std::string> names;
  for (const auto& f : schema.fields) names.push_back(f.name);
  CHECK(names == fx.oracle.at("columns").get<std::vector<std::string>>());
}

TEST_CASE("snapshot selectors") {
  table_fixture fx("posdel");
  auto meta = fx.load();

  const auto& cur = iceberg::resolve_snapshot(meta, iceberg::current_snapshot);
  CHECK(cur.snapshot_id == fx.oracle.at("current_snapshot_id").get<int64_t>());

  int64_t first = fx.oracle.at("snapshots")[0].at("snapshot_id").get<int64_t>();
  const auto& old_snap = iceberg::resolve_snapshot(meta, first);
  CHECK(old_snap.snapshot_id == first);
  CHECK(old_snap.sequence_number <
        fx.oracle.at("snapshots")[1].at("sequence_number").get<int64_t>());

  CHECK(code_of([&] { iceberg::resolve_snapshot(meta, 999); }) ==
        errc::unknown_snapshot_id);
}

TEST_CASE("scan plans pair deletes per the sequence rules") {
  for (const auto& name : k_tables) {
    DYNAMIC_SECTION(name) {
      table_fixture fx(name);
      auto meta = fx.load();
      for (const auto& snap_oracle : fx.oracle.at("snapshots")) {
        int64_t sid = snap_oracle.at("snapshot_id").get<int64_t>();
        DYNAMIC_SECTION("snapshot " << sid) {
          const auto& snap = iceberg::resolve_snapshot(meta, sid);
          auto plan = iceberg::plan_scan(meta, snap, fx.open);
          const auto& expected = snap_oracle.at("plan");
          REQUIRE(plan.files.size() == expected.size());
          for (size_t i = 0; i < plan.files.size(); ++i) {
            const auto& f = plan.files[i];
            CHECK(f.logical_path == expected[i].at("file").get<std::string>());
            std::vector<std::string> dels;
            for (const auto& d : f.deletes) dels.push_back(d.logical_path);
            CHECK(dels == expected[i].at("deletes").get<std::vector<std::string>>());
            CHECK(partition_to_json(f.partition) == expected[i].at("partition"));
          }
        }
      }
    }
  }
}

TEST_CASE("every snapshot of every table scans to its oracle rows") {
  for (const auto& name : k_tables) {
    DYNAMIC_SECTION(name) {
      table_fixture fx(name);
      auto meta = fx.load();
      for (const auto& snap_oracle : fx.oracle.at("snapshots")) {
        int64_t sid = snap_oracle.at("snapshot_id").get<int64_t>();
        DYNAMIC_SECTION("snapshot " << sid) {
          const auto& snap = iceberg::resolve_snapshot(meta, sid);
          auto result = iceberg::scan_table(meta, snap, fx.open);
          CHECK(result.columns ==
                fx.oracle.at("columns").get<std::vector<std::string>>());
          json got = rows_to_json(result.rows);
          const json& want = snap_oracle.at("rows");
          REQUIRE(got.size() == want.size());
          for (size_t i = 0; i < got.size(); ++i) {
            CAPTURE(name, sid, i);
            REQUIRE(got[i] == want[i]);
          }
        }
      }
    }
  }
}

TEST_CASE("fetch purposes label the metadata, manifest, and delete reads") {
  table_fixture fx("posdel");
  auto meta = fx.load();
  const auto& snap = iceberg::resolve_snapshot(meta, iceberg::current_snapshot);
  auto result = iceberg::scan_table(meta, snap, fx.open);
  REQUIRE(!result.rows.empty());

  CHECK(fx.log->count(io::fetch_purpose::metadata_json) == 1);
  CHECK(fx.log->count(io::fetch_purpose::manifest_list) == 1);
  CHECK(fx.log->count(io::fetch_purpose::manifest) ==
        fx.oracle.at("snapshots")[1].at("manifests").get<size_t>());
  CHECK(fx.log->count(io::fetch_purpose::delete_file) >= 2);  // tail + chunks

  for (const auto& ev : fx.log->snapshot()) {
    if (ev.url.find("del-a.parquet") != std::string::npos) {
      CHECK(ev.purpose == io::fetch_purpose::delete_file);
    }
    if (ev.url.find("v1.metadata.json") != std::string::npos) {
      CHECK(ev.purpose == io::fetch_purpose::metadata_json);
    }
    if (ev.url.find("snap-") != std::string::npos) {
      CHECK(ev.purpose == io::fetch_purpose::manifest_list);
    }
  }
}

TEST_CASE("position delete at the data file's sequence applies, equality does not") {
  table_fixture fx("seq_equal");
  auto meta = fx.load();
  const auto& snap = iceberg::resolve_snapshot(meta, iceberg::current_snapshot);

  auto plan = iceberg::plan_scan(meta, snap, fx.open);
  REQUIRE(plan.files.size() == 1);
  std::vector<int> contents;
  for (const auto& d : plan.files[0].deletes) contents.push_back(d.content);
  CHECK(contents == std::vector<int>{1});  // only the position delete pairs

  auto result = iceberg::scan_table(meta, snap, fx.open);
  std::vector<int64_t> ids;
  std::vector<std::string> cats;
  for (const auto& row : result.rows) {
    ids.push_back(row[0].as_i64());
    cats.push_back(row[1].as_str());
  }
  CHECK(ids == std::vector<int64_t>{1, 2, 3});  // position 0 dropped
  CHECK(std::find(cats.begin(), cats.end(), "c") != cats.end());  // eq target kept
}

TEST_CASE("adding delete files never grows the row count") {
  table_fixture fx("monotone");
  auto meta = fx.load();
  size_t prev = SIZE_MAX;
  for (const auto& snap_oracle : fx.oracle.at("snapshots")) {
    const auto& snap = iceberg::resolve_snapshot(
        meta, snap_oracle.at("snapshot_id").get<int64_t>());
    auto result = iceberg::scan_table(meta, snap, fx.open);
    CHECK(result.rows.size() <= prev);
    prev = result.rows.size();
  }
  CHECK(prev < SIZE_MAX);
}

TEST_CASE("format version 1 is rejected") {
  table_fixture fx("v1");
  CHECK(code_of([&] { fx.load(); }) == errc::unsupported_format_version);
}

TEST_CASE("a table with no current snapshot loads but cannot resolve current") {
  table_fixture fx("no_current");
  auto meta = fx.load();
  CHECK(!meta.current_snapshot_id.has_value());
  CHECK(code_of([&] {
          iceberg::resolve_snapshot(meta, iceberg::current_snapshot);
        }) == errc::no_current_snapshot);
  CHECK(code_of([&] { iceberg::resolve_snapshot(meta, 7); }) ==
        errc::unknown_snapshot_id);
}

TEST_CASE("metadata corruption surfaces") {
  table_fixture fx("plain");

  SECTION("not json") {
    std::string path = fx.root + "/data/a.parquet";  // parquet is not json
    CHECK(code_of([&] { iceberg::load_table_metadata(path, fx.open); }) ==
          errc::metadata_corrupt);
  }
  SECTION("manifest list that is not avro") {
    auto meta = fx.load();
    auto snap = iceberg::resolve_snapshot(meta, iceberg::current_snapshot);
    snap.manifest_list = fx.root + "/metadata/v1.metadata.json";
    CHECK(code_of([&] { iceberg::plan_scan(meta, snap, fx.open); }) ==
          errc::manifest_corrupt);
  }
}
