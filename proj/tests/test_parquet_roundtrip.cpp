#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <string>
#include <vector>

#include "rill/io/fetch_log.hpp"
#include "rill/io/source.hpp"
#include "rill/parquet/file.hpp"
#include "rill/parquet/write.hpp"

using namespace rill;
using parquet::cmp_op;
using parquet::parquet_file;
using parquet::physical_type;
using parquet::stats_predicate;
using parquet::write_column;
using parquet::write_options;
using parquet::write_table;

namespace {

struct fixture {
  std::shared_ptr<io::fetch_log> log = std::make_shared<io::fetch_log>();
  std::shared_ptr<parquet_file> file;

  explicit fixture(byte_buffer bytes, parquet::parquet_options opt = {}) {
    auto src = std::make_shared<io::memory_source>("mem://t.parquet",
                                                   std::move(bytes), log);
    file = std::make_shared<parquet_file>(src, opt);
  }
};

byte_buffer small_table(int64_t rows, int64_t group_rows) {
  std::vector<write_column> cols{
      {"id", physical_type::int64, parquet::logical_kind::none, false},
      {"name", physical_type::byte_array, parquet::logical_kind::string, false},
      {"score", physical_type::dbl, parquet::logical_kind::none, true},
      {"flag", physical_type::boolean, parquet::logical_kind::none, false},
      {"day", physical_type::int32, parquet::logical_kind::date, true},
      {"ts", physical_type::int64, parquet::logical_kind::timestamp_micros, false},
  };
  std::vector<std::vector<value>> data(cols.size());
  for (int64_t i = 0; i < rows; ++i) {
    data[0].push_back(value::i64(i));
    data[1].push_back(value::str("row-" + std::to_string(i)));
    data[2].push_back(i % 3 == 0 ? value::null() : value::f64(i * 0.5));
    data[3].push_back(value::boolean(i % 2 == 0));
    data[4].push_back(i % 5 == 0 ? value::null()
                                 : value::date(static_cast<int32_t>(19000 + i)));
    data[5].push_back(value::timestamp(1700000000000000 + i));
  }
  write_options opt;
  opt.row_group_rows = group_rows;
  return write_table(cols, data, opt);
}

}  // namespace

TEST_CASE("roundtrip: schema and row values survive") {
  fixture fx(small_table(100, 40));
  auto& f = *fx.file;

  CHECK(f.num_rows() == 100);
  CHECK(f.num_row_groups() == 3);  // 40 + 40 + 20
  CHECK(f.column_names() ==
        std::vector<std::string>{"id", "name", "score", "flag", "day", "ts"});

  auto rows = f.read_rows();
  REQUIRE(rows.size() == 100);
  for (int64_t i = 0; i < 100; ++i) {
    const auto& r = rows[static_cast<size_t>(i)];
    REQUIRE(r.size() == 6);
    CHECK(r[0].as_i64() == i);
    CHECK(r[1].as_str() == "row-" + std::to_string(i));
    if (i % 3 == 0) {
      CHECK(r[2].is_null());
    } else {
      CHECK(r[2].as_f64() == i * 0.5);
    }
    CHECK(r[3].as_bool() == (i % 2 == 0));
    if (i % 5 == 0) {
      CHECK(r[4].is_null());
    } else {
      CHECK(r[4].type() == value::kind::date);
      CHECK(r[4].as_i64() == 19000 + i);
    }
    CHECK(r[5].type() == value::kind::timestamp);
    CHECK(r[5].as_i64() == 1700000000000000 + i);
  }
}

TEST_CASE("roundtrip: column projection reads only that column's chunks") {
  fixture fx(small_table(100, 40));
  auto names = fx.file->read_column("name");
  REQUIRE(names.size() == 100);
  CHECK(names[7].as_str() == "row-7");

  size_t chunk_reads = fx.log->count(io::fetch_purpose::column_chunk);
  CHECK(chunk_reads == 3);  // one leaf x three groups

  try {
    fx.file->read_column("nope");
    FAIL("expected error");
  } catch (const error& e) {
    CHECK(e.code() == errc::unknown_column);
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
}

TEST_CASE("roundtrip: footer costs at most two ranged reads") {
  SECTION("tail hint covers the footer: one read") {
    fixture fx(small_table(50, 50));
    fx.file->footer();
    CHECK(fx.log->count(io::fetch_purpose::tail) == 1);
    CHECK(fx.log->count(io::fetch_purpose::footer) == 0);
  }
  SECTION("tiny tail hint: exactly one extra footer read") {
    parquet::parquet_options opt;
    opt.tail_hint = 16;
    fixture fx(small_table(50, 50), opt);
    fx.file->footer();
    CHECK(fx.log->count(io::fetch_purpose::tail) == 1);
    CHECK(fx.log->count(io::fetch_purpose::footer) == 1);
  }
  SECTION("footer decode is memoized") {
    fixture fx(small_table(50, 50));
    fx.file->footer();
    fx.file->footer();
    fx.file->schema();
    CHECK(fx.log->size() == 1);
  }
}

TEST_CASE("roundtrip: full scan fetches exactly leaves x groups chunks") {
  fixture fx(small_table(100, 25));  // 4 groups, 6 leaves
  auto rows = fx.file->read_rows();
  CHECK(rows.size() == 100);
  CHECK(fx.log->count(io::fetch_purpose::column_chunk) == 24);
  // chunk cache: re-reading costs no further fetches
  fx.file->read_rows();
  CHECK(fx.log->count(io::fetch_purpose::column_chunk) == 24);
}

TEST_CASE("pruning: statistics drop impossible groups, keep possible ones") {
  fixture fx(small_table(100, 25));  // ids 0-24, 25-49, 50-74, 75-99
  auto& f = *fx.file;

  auto keep = f.prune_row_groups({{"id", cmp_op::eq, value::i64(30)}});
  CHECK(keep == std::vector<size_t>{1});

  keep = f.prune_row_groups({{"id", cmp_op::lt, value::i64(25)}});
  CHECK(keep == std::vector<size_t>{0});

  keep = f.prune_row_groups({{"id", cmp_op::ge, value::i64(75)}});
  CHECK(keep == std::vector<size_t>{3});

  keep = f.prune_row_groups({{"id", cmp_op::gt, value::i64(24)},
                             {"id", cmp_op::le, value::i64(50)}});
  CHECK(keep == std::vector<size_t>{1, 2});

  // string stats
  keep = f.prune_row_groups({{"name", cmp_op::eq, value::str("row-99")}});
  REQUIRE(keep.size() >= 1);  // "row-99" sorts within several groups' ranges
  // no predicate: everything stays
  CHECK(f.prune_row_groups({}).size() == 4);
  // unknown column: conservative keep
  CHECK(f.prune_row_groups({{"zzz", cmp_op::eq, value::i64(0)}}).size() == 4);
  // incomparable literal: conservative keep
  CHECK(f.prune_row_groups({{"id", cmp_op::eq, value::str("x")}}).size() == 4);
}

TEST_CASE("pruned scan reads only surviving groups") {
  fixture fx(small_table(100, 25));
  auto keep = fx.file->prune_row_groups({{"id", cmp_op::eq, value::i64(99)}});
  REQUIRE(keep == std::vector<size_t>{3});
  auto rows = fx.file->read_rows({"id", "name"}, &keep);
  REQUIRE(rows.size() == 25);
  CHECK(rows[24][0].as_i64() == 99);
  CHECK(fx.log->count(io::fetch_purpose::column_chunk) == 2);  // 2 leaves x 1 group
}

TEST_CASE("error surface: malformed files") {
  SECTION("empty file") {
    fixture fx(byte_buffer{});
    CHECK_THROWS_AS(fx.file->footer(), error);
    try {
      fixture fx2(byte_buffer{});
      fx2.file->footer();
    } catch (const error& e) {
      CHECK(e.code() == errc::empty_file);
    }
  }
  SECTION("not parquet") {
    fixture fx(byte_buffer{"this is just text, no magic"});
    try {
      fx.file->footer();
      FAIL("expected error");
    } catch (const error& e) {
      CHECK(e.code() == errc::not_parquet);
    }
  }
  SECTION("encrypted footer magic") {
    byte_buffer b = small_table(10, 10);
    b.replace(b.size() - 4, 4, "PARE");
    fixture fx(std::move(b));
    try {
      fx.file->footer();
      FAIL("expected error");
    } catch (const error& e) {
      CHECK(e.code() == errc::unsupported_feature);
    }
  }
  SECTION("footer length past file size") {
    byte_buffer b = small_table(10, 10);
    uint32_t huge = 0x7fffffff;
    b.replace(b.size() - 8, 4, reinterpret_cast<const char*>(&huge), 4);
    fixture fx(std::move(b));
    try {
      fx.file->footer();
      FAIL("expected error");
    } catch (const error& e) {
      CHECK(e.code() == errc::footer_corrupt);
    }
  }
  SECTION("corrupt footer bytes") {
    byte_buffer b = small_table(10, 10);
    // scramble the middle of the footer
    uint32_t flen;
    std::memcpy(&flen, b.data() + b.size() - 8, 4);
    size_t fstart = b.size() - 8 - flen;
    for (size_t i = 0; i < flen / 2; ++i) b[fstart + i] ^= 0x5A;
    fixture fx(std::move(b));
    CHECK_THROWS_AS(fx.file->footer(), error);
  }
  SECTION("truncated mid-file: chunk read past end") {
    byte_buffer good = small_table(10, 10);
    // footer stays intact; cut page bytes by lying about the file through a
    // shorter memory buffer is impossible, so instead corrupt a page header
    byte_buffer b = good;
    b[4] ^= 0x7F;  // first page header byte after leading magic
    fixture fx(std::move(b));
    CHECK_THROWS_AS(fx.file->read_rows(), error);
  }
}

TEST_CASE("empty table roundtrip") {
  std::vector<write_column> cols{
      {"a", physical_type::int64, parquet::logical_kind::none, false}};
  std::vector<std::vector<value>> data(1);
  fixture fx(write_table(cols, data));
  CHECK(fx.file->num_rows() == 0);
  CHECK(fx.file->read_rows().empty());
  CHECK(fx.file->read_column("a").empty());
}

TEST_CASE("all-null optional column") {
  std::vector<write_column> cols{
      {"a", physical_type::int64, parquet::logical_kind::none, false},
      {"b", physical_type::byte_array, parquet::logical_kind::string, true},
  };
  std::vector<std::vector<value>> data(2);
  for (int i = 0; i < 10; ++i) {
    data[0].push_back(value::i64(i));
    data[1].push_back(value::null());
  }
  fixture fx(write_table(cols, data));
  auto rows = fx.file->read_rows();
  REQUIRE(rows.size() == 10);
  for (auto& r : rows) CHECK(r[1].is_null());
}
