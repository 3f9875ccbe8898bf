#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "rill/iceberg/avro.hpp"

using namespace rill;
using iceberg::read_avro;

namespace {

void put_uvarint(std::string& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

void put_long(std::string& out, int64_t v) {
  put_uvarint(out, (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63));
}

void put_bytes(std::string& out, std::string_view b) {
  put_long(out, static_cast<int64_t>(b.size()));
  out.append(b);
}

const std::string k_sync(16, 's');

std::string container(std::string_view schema, std::string_view body, int64_t count,
                      std::string_view codec = "null",
                      std::string_view block_sync = k_sync) {
  std::string out("Obj\x01", 4);
  put_long(out, 2);
  put_bytes(out, "avro.schema");
  put_bytes(out, schema);
  put_bytes(out, "avro.codec");
  put_bytes(out, codec);
  put_long(out, 0);
  out += k_sync;
  if (count > 0) {
    put_long(out, count);
    put_bytes(out, body);
    out += block_sync;
  }
  return out;
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

}  // namespace

TEST_CASE("record with union fields decodes") {
  const char* schema = R"({
    "type": "record", "name": "r",
    "fields": [
      {"name": "a", "type": "long"},
      {"name": "b", "type": ["null", "string"], "default": null}
    ]})";
  std::string body;
  put_long(body, 1);        // a = 1
  put_long(body, 1);        // union branch 1
  put_bytes(body, "x");     // b = "x"
  put_long(body, -2);       // a = -2
  put_long(body, 0);        // union branch 0 -> null

  auto f = read_avro(container(schema, body, 2));
  REQUIRE(f.records.size() == 2);
  CHECK(iceberg::field(f.records[0], "a")->as_i64() == 1);
  CHECK(iceberg::field(f.records[0], "b")->as_str() == "x");
  CHECK(iceberg::field(f.records[1], "a")->as_i64() == -2);
  CHECK(iceberg::field(f.records[1], "b")->is_null());
  CHECK(f.metadata.at("avro.codec") == "null");
}

TEST_CASE("arrays, maps, enums, fixed, doubles decode") {
  const char* schema = R"({
    "type": "record", "name": "r",
    "fields": [
      {"name": "xs", "type": {"type": "array", "items": "int"}},
      {"name": "m", "type": {"type": "map", "values": "long"}},
      {"name": "e", "type": {"type": "enum", "name": "col", "symbols": ["red", "blue"]}},
      {"name": "fx", "type": {"type": "fixed", "name": "f4", "size": 4}},
      {"name": "d", "type": "double"},
      {"name": "ok", "type": "boolean"}
    ]})";
  std::string body;
  put_long(body, 2);  // array block of 2
  put_long(body, 7);
  put_long(body, 8);
  put_long(body, 0);  // array end
  put_long(body, 1);  // map block of 1
  put_bytes(body, "k");
  put_long(body, 42);
  put_long(body, 0);  // map end
  put_long(body, 1);  // enum -> "blue"
  body += "\x01\x02\x03\x04";
  double d = 2.5;
  body.append(reinterpret_cast<const char*>(&d), 8);
  body += '\x01';  // true

  auto f = read_avro(container(schema, body, 1));
  REQUIRE(f.records.size() == 1);
  const value& rec = f.records[0];
  const auto& xs = iceberg::field(rec, "xs")->as_list();
  REQUIRE(xs.size() == 2);
  CHECK(xs[0].as_i64() == 7);
  CHECK(xs[1].as_i64() == 8);
  const auto& m = iceberg::field(rec, "m")->as_struct();
  REQUIRE(m.size() == 1);
  CHECK(m[0].first == "k");
  CHECK(m[0].second.as_i64() == 42);
  CHECK(iceberg::field(rec, "e")->as_str() == "blue");
  CHECK(iceberg::field(rec, "fx")->as_str() == "\x01\x02\x03\x04");
  CHECK(iceberg::field(rec, "d")->as_f64() == 2.5);
  CHECK(iceberg::field(rec, "ok")->as_bool());
}

TEST_CASE("negative array block count carries a byte size") {
  const char* schema = R"({
    "type": "record", "name": "r",
    "fields": [{"name": "xs", "type": {"type": "array", "items": "int"}}]})";
  std::string items;
  put_long(items, 5);
  put_long(items, 6);
  std::string body;
  put_long(body, -2);  // 2 items, size follows
  put_long(body, static_cast<int64_t>(items.size()));
  body += items;
  put_long(body, 0);

  auto f = read_avro(container(schema, body, 1));
  const auto& xs = iceberg::field(f.records[0], "xs")->as_list();
  REQUIRE(xs.size() == 2);
  CHECK(xs[0].as_i64() == 5);
  CHECK(xs[1].as_i64() == 6);
}

TEST_CASE("named type can be reused by reference") {
  const char* schema = R"({
    "type": "record", "name": "outer",
    "fields": [
      {"name": "p", "type": {"type": "record", "name": "pair",
        "fields": [{"name": "k", "type": "int"}, {"name": "v", "type": "int"}]}},
      {"name": "q", "type": "pair"}
    ]})";
  std::string body;
  put_long(body, 1);
  put_long(body, 2);
  put_long(body, 3);
  put_long(body, 4);
  auto f = read_avro(container(schema, body, 1));
  const value& rec = f.records[0];
  CHECK(iceberg::field(*iceberg::field(rec, "p"), "v")->as_i64() == 2);
  CHECK(iceberg::field(*iceberg::field(rec, "q"), "k")->as_i64() == 3);
}

TEST_CASE("container error surfaces") {
  const char* schema = R"({"type": "record", "name": "r",
                           "fields": [{"name": "a", "type": "long"}]})";
  std::string body;
  put_long(body, 1);

  SECTION("bad magic") {
    std::string c = container(schema, body, 1);
    c[0] = 'X';
    CHECK(code_of([&] { read_avro(c); }) == errc::manifest_corrupt);
  }
  SECTION("block sync mismatch") {
    std::string c = container(schema, body, 1, "null", std::string(16, 'x'));
    CHECK(code_of([&] { read_avro(c); }) == errc::manifest_corrupt);
  }
  SECTION("truncated datum") {
    std::string c = container(schema, "", 1);
    CHECK(code_of([&] { read_avro(c); }) == errc::manifest_corrupt);
  }
  SECTION("unknown codec") {
    CHECK(code_of([&] { read_avro(container(schema, body, 1, "snappy")); }) ==
          errc::unsupported_avro_feature);
  }
  SECTION("unknown schema type") {
    const char* bad = R"({"type": "record", "name": "r",
                          "fields": [{"name": "a", "type": "uuid5"}]})";
    CHECK(code_of([&] { read_avro(container(bad, body, 1)); }) ==
          errc::unsupported_avro_feature);
  }
  SECTION("schema that is not json") {
    CHECK(code_of([&] { read_avro(container("{nope", body, 1)); }) ==
          errc::manifest_corrupt);
  }
  SECTION("varint running off the end") {
    std::string c = container(schema, body, 1);
    c.resize(c.size() - 17);  // drop sync and part of the block
    CHECK(code_of([&] { read_avro(c); }) == errc::manifest_corrupt);
  }
}

TEST_CASE("empty container has no records") {
  const char* schema = R"({"type": "record", "name": "r",
                           "fields": [{"name": "a", "type": "long"}]})";
  auto f = read_avro(container(schema, "", 0));
  CHECK(f.records.empty());
}
