#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rill/io/source.hpp"
#include "rill/parquet/file.hpp"

using namespace rill;
using nlohmann::json;
using parquet::cmp_op;
using parquet::parquet_file;
using parquet::stats_predicate;

namespace {

std::filesystem::path fixture_dir() {
  const char* env = std::getenv("RILL_FIXTURES");
  return std::filesystem::path(env ? env : RILL_FIXTURE_DIR) / "parquet";
}

struct opened {
  std::shared_ptr<io::fetch_log> log = std::make_shared<io::fetch_log>();
  std::shared_ptr<parquet_file> file;
  json sidecar;
};

opened open_fixture(const std::string& name, parquet::parquet_options opt = {}) {
  opened o;
  auto dir = fixture_dir();
  auto src = std::make_shared<io::local_file_source>(
      (dir / (name + ".parquet")).string(), o.log);
  o.file = std::make_shared<parquet_file>(src, opt);
  std::ifstream in(dir / (name + ".rows.json"));
  REQUIRE(in.good());
  in >> o.sidecar;
  return o;
}

json rows_to_json(const std::vector<std::vector<value>>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json jr = json::array();
    for (const auto& v : r) jr.push_back(v.to_json());
    out.push_back(std::move(jr));
  }
  return out;
}

const char* k_fixtures[] = {
    "flat_required", "flat_nullable", "dict_snappy",   "dict_gzip_pagev2",
    "zstd_floats",   "nested_lists",  "nested_struct", "list_of_struct",
    "struct_of_list", "logical_types", "exotic_map",    "wide_2000",
    "empty_table",   "single_row",    "all_null",      "no_stats",
    "big_pruning",
};

}  // namespace

TEST_CASE("every fixture decodes to the reference rows") {
  for (const char* name : k_fixtures) {
    DYNAMIC_SECTION(name) {
      auto fx = open_fixture(name);
      auto& side = fx.sidecar;

      CHECK(fx.file->num_rows() == side["num_rows"].get<int64_t>());
      CHECK(fx.file->num_row_groups() == side["num_row_groups"].get<size_t>());
      auto names = fx.file->column_names();
      CHECK(json(names) == side["columns"]);

      auto rows = fx.file->read_rows();
      json got = rows_to_json(rows);
      REQUIRE(got.size() == side["rows"].size());
      for (size_t i = 0; i < got.size(); ++i) {
        if (got[i] != side["rows"][i]) {
          CAPTURE(name, i, got[i].dump(), side["rows"][i].dump());
          FAIL("row mismatch");
        }
      }
    }
  }
}

TEST_CASE("wide schema with a tiny tail hint costs exactly two reads") {
  parquet::parquet_options opt;
  opt.tail_hint = 4096;  // the 2000-column footer is ~1MB
  auto fx = open_fixture("wide_2000", opt);
  fx.file->footer();
  auto events = fx.log->snapshot();
  REQUIRE(events.size() == 2);
  CHECK(events[0].purpose == io::fetch_purpose::tail);
  CHECK(events[1].purpose == io::fetch_purpose::footer);
  CHECK(fx.file->schema().leaves.size() == 2000);
}

TEST_CASE("full scan of a dictionary fixture fetches one range per chunk") {
  auto fx = open_fixture("dict_snappy");
  auto rows = fx.file->read_rows();
  CHECK(rows.size() == 1000);
  // 3 leaves x 2 groups
  CHECK(fx.log->count(io::fetch_purpose::column_chunk) == 6);
}

TEST_CASE("projection never touches unrequested columns") {
  auto fx = open_fixture("big_pruning");
  auto vals = fx.file->read_column("id");
  CHECK(vals.size() == 10000);
  CHECK(fx.log->count(io::fetch_purpose::column_chunk) == 8);  // 1 leaf x 8 groups
}

TEST_CASE("row-group pruning is sound under random predicates") {
  auto fx = open_fixture("big_pruning");
  auto& f = *fx.file;
  const size_t group_rows = 1250;

  auto rows = f.read_rows();
  REQUIRE(rows.size() == 10000);
  const auto& side_cols = fx.sidecar["columns"];
  auto col_index = [&](const std::string& n) {
    for (size_t i = 0; i < side_cols.size(); ++i) {
      if (side_cols[i] == n) return i;
    }
    FAIL("unknown column " + n);
    return size_t{0};
  };

  std::mt19937_64 rng(0xfeedbeef);
  const std::string cols[] = {"id", "v", "neg", "s", "cat"};
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::string& cname = cols[rng() % 5];
    size_t ci = col_index(cname);
    cmp_op op = static_cast<cmp_op>(rng() % 5);

    // literal: sometimes sampled from the data, sometimes out of range
    value literal;
    const value& probe = rows[rng() % rows.size()][ci];
    if (probe.is_null()) continue;
    if (rng() % 4 == 0) {
      if (probe.type() == value::kind::i64) {
        literal = value::i64(static_cast<int64_t>(rng() % 40000) - 20000);
      } else if (probe.type() == value::kind::f64) {
        literal = value::f64((static_cast<double>(rng() % 4000000) - 2000000.0));
      } else {
        literal = value::str(std::string(1, static_cast<char>('a' + rng() % 26)));
      }
    } else {
      literal = probe;
    }

    auto kept = f.prune_row_groups({{cname, op, literal}});
    std::vector<bool> kept_mask(8, false);
    for (size_t g : kept) kept_mask[g] = true;

    for (size_t r = 0; r < rows.size(); ++r) {
      const value& v = rows[r][ci];
      if (v.is_null()) continue;
      int c;
      try {
        c = v.compare(literal);
      } catch (const error&) {
        continue;
      }
      bool match = false;
      switch (op) {
        case cmp_op::eq: match = c == 0; break;
        case cmp_op::lt: match = c < 0; break;
        case cmp_op::le: match = c <= 0; break;
        case cmp_op::gt: match = c > 0; break;
        case cmp_op::ge: match = c >= 0; break;
      }
      if (match && !kept_mask[r / group_rows]) {
        CAPTURE(cname, static_cast<int>(op), literal.to_display(), r);
        FAIL("pruned a row group containing a matching row");
      }
    }
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("files without statistics keep every row group") {
  auto fx = open_fixture("no_stats");
  auto kept = fx.file->prune_row_groups(
      {{"id", cmp_op::eq, value::i64(-999999)}});
  CHECK(kept.size() == fx.file->num_row_groups());
}
