#include <catch2/catch_amalgamated.hpp>

#include "rill/parquet/thrift.hpp"

using namespace rill::parquet::thrift;

TEST_CASE("compact roundtrip: scalar fields") {
  compact_writer w;
  w.begin_struct();
  w.field_bool(1, true);
  w.field_bool(2, false);
  w.field_i32(3, -123456);
  w.field_i64(4, INT64_MIN);
  w.field_i64(5, INT64_MAX);
  w.field_binary(6, "hello\x00world");
  w.end_struct();

  compact_reader r(w.buffer());
  r.begin_struct();
  field_info f;
  REQUIRE(r.next_field(f));
  CHECK(f.id == 1);
  CHECK(f.bool_value == true);
  REQUIRE(r.next_field(f));
  CHECK(f.id == 2);
  CHECK(f.bool_value == false);
  REQUIRE(r.next_field(f));
  CHECK(f.id == 3);
  CHECK(r.read_i32() == -123456);
  REQUIRE(r.next_field(f));
  CHECK(r.read_i64() == INT64_MIN);
  REQUIRE(r.next_field(f));
  CHECK(r.read_i64() == INT64_MAX);
  REQUIRE(r.next_field(f));
  CHECK(r.read_binary() == "hello");  // string literal truncates at NUL
  CHECK_FALSE(r.next_field(f));
  r.end_struct();
  CHECK(r.at_end());
}

TEST_CASE("compact roundtrip: long-form field ids") {
  compact_writer w;
  w.begin_struct();
  w.field_i32(200, 7);   // delta > 15 forces long form
  w.field_i32(201, 8);   // short form again
  w.field_i32(180, 9);   // negative delta forces long form
  w.end_struct();

  compact_reader r(w.buffer());
  r.begin_struct();
  field_info f;
  REQUIRE(r.next_field(f));
  CHECK(f.id == 200);
  CHECK(r.read_i32() == 7);
  REQUIRE(r.next_field(f));
  CHECK(f.id == 201);
  CHECK(r.read_i32() == 8);
  REQUIRE(r.next_field(f));
  CHECK(f.id == 180);
  CHECK(r.read_i32() == 9);
  CHECK_FALSE(r.next_field(f));
}

TEST_CASE("compact roundtrip: nested struct resets field numbering") {
  compact_writer w;
  w.begin_struct();
  w.field_i32(5, 1);
  w.field_struct(6);
  w.field_i32(1, 2);  // inner ids restart
  w.field_i32(2, 3);
  w.end_struct();
  w.field_i32(7, 4);  // outer numbering resumes (delta from 6)
  w.end_struct();

  compact_reader r(w.buffer());
  r.begin_struct();
  field_info f;
  REQUIRE(r.next_field(f));
  CHECK(f.id == 5);
  CHECK(r.read_i32() == 1);
  REQUIRE(r.next_field(f));
  CHECK(f.id == 6);
  r.begin_struct();
  field_info g;
  REQUIRE(r.next_field(g));
  CHECK(g.id == 1);
  CHECK(r.read_i32() == 2);
  REQUIRE(r.next_field(g));
  CHECK(g.id == 2);
  CHECK(r.read_i32() == 3);
  CHECK_FALSE(r.next_field(g));
  r.end_struct();
  REQUIRE(r.next_field(f));
  CHECK(f.id == 7);
  CHECK(r.read_i32() == 4);
  CHECK_FALSE(r.next_field(f));
}

TEST_CASE("compact roundtrip: lists") {
  compact_writer w;
  w.begin_struct();
  w.field_list(1, ct_i32, 3);
  w.elem_i32(-1);
  w.elem_i32(0);
  w.elem_i32(1);
  w.field_list(2, ct_struct, 2);
  for (int i = 0; i < 2; ++i) {
    w.elem_struct_begin();
    w.field_i64(1, 10 + i);
    w.elem_struct_end();
  }
  w.field_list(3, ct_binary, 16);  // count >= 15 takes the varint form
  for (int i = 0; i < 16; ++i) w.elem_binary("x");
  w.end_struct();

  compact_reader r(w.buffer());
  r.begin_struct();
  field_info f;
  REQUIRE(r.next_field(f));
  auto [t1, n1] = r.read_list_header();
  CHECK(t1 == ct_i32);
  REQUIRE(n1 == 3);
  CHECK(r.read_i32() == -1);
  CHECK(r.read_i32() == 0);
  CHECK(r.read_i32() == 1);
  REQUIRE(r.next_field(f));
  auto [t2, n2] = r.read_list_header();
  CHECK(t2 == ct_struct);
  REQUIRE(n2 == 2);
  for (int i = 0; i < 2; ++i) {
    r.begin_struct();
    field_info g;
    REQUIRE(r.next_field(g));
    CHECK(r.read_i64() == 10 + i);
    CHECK_FALSE(r.next_field(g));
    r.end_struct();
  }
  REQUIRE(r.next_field(f));
  auto [t3, n3] = r.read_list_header();
  CHECK(t3 == ct_binary);
  CHECK(n3 == 16);
  for (int i = 0; i < 16; ++i) CHECK(r.read_binary() == "x");
  CHECK_FALSE(r.next_field(f));
}

TEST_CASE("compact skip covers every wire type") {
  compact_writer w;
  w.begin_struct();
  w.field_bool(1, true);
  w.field_i32(2, 42);
  w.field_i64(3, -42);
  w.field_binary(4, "skipped");
  w.field_list(5, ct_i32, 2);
  w.elem_i32(1);
  w.elem_i32(2);
  w.field_struct(6);
  w.field_binary(1, "inner");
  w.end_struct();
  w.field_i32(7, 99);  // the survivor
  w.end_struct();

  compact_reader r(w.buffer());
  r.begin_struct();
  field_info f;
  int survivor = 0;
  while (r.next_field(f)) {
    if (f.id == 7) {
      survivor = r.read_i32();
    } else {
      r.skip(f.type);
    }
  }
  r.end_struct();
  CHECK(survivor == 99);
  CHECK(r.at_end());
}

TEST_CASE("compact reader rejects truncated input") {
  compact_writer w;
  w.begin_struct();
  w.field_binary(1, "0123456789");
  w.end_struct();
  std::string cut = w.buffer().substr(0, 4);

  compact_reader r(cut);
  r.begin_struct();
  field_info f;
  REQUIRE(r.next_field(f));
  CHECK_THROWS_AS(r.read_binary(), rill::error);
}

TEST_CASE("varint overflow is rejected") {
  std::string bad(11, '\xff');
  compact_reader r(bad);
  CHECK_THROWS_AS(r.read_varint(), rill::error);
}
