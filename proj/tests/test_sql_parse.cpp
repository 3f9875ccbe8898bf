#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <string>

#include "rill/engine/parser.hpp"

using namespace rill;
using namespace rill::engine;

namespace {

errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const error& e) {
    return e.code();
  }
  FAIL("expected a rill::error");
  return errc::syntax_error;
}

std::string msg_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const error& e) {
    return e.what();
  }
  FAIL("expected a rill::error");
  return {};
}

}  // namespace

TEST_CASE("SELECT 1 parses to a literal projection") {
  auto st = parse_select("SELECT 1");
  REQUIRE(st.items.size() == 1);
  CHECK(st.items[0].e->k == expr_kind::literal);
  CHECK(st.items[0].e->lit.as_i64() == 1);
  CHECK(!st.from.has_value());
  CHECK(!st.limit.has_value());
}

TEST_CASE("the canonical session query parses with call, param, and limit") {
  auto st = parse_select(
      "SELECT llm('classify', content) FROM traces WHERE session_id = $id LIMIT 5");
  REQUIRE(st.items.size() == 1);
  const auto& call = *st.items[0].e;
  CHECK(call.k == expr_kind::call);
  CHECK(call.name == "llm");
  REQUIRE(call.args.size() == 2);
  CHECK(call.args[0]->k == expr_kind::literal);
  CHECK(call.args[0]->lit.as_str() == "classify");
  CHECK(call.args[1]->k == expr_kind::column);
  REQUIRE(st.from.has_value());
  CHECK(st.from->table == "traces");
  REQUIRE(st.where);
  CHECK(st.where->k == expr_kind::binary);
  CHECK(st.where->op == "=");
  CHECK(st.where->args[1]->k == expr_kind::param);
  CHECK(st.where->args[1]->name == "id");
  REQUIRE(st.limit.has_value());
  CHECK(*st.limit == 5);
}

TEST_CASE("keywords are case-insensitive") {
  auto st = parse_select("select A from T where B > 1 order by C desc limit 3");
  CHECK(st.items.size() == 1);
  CHECK(st.from->table == "T");
  REQUIRE(st.order_by.size() == 1);
  CHECK(st.order_by[0].desc);
  CHECK(*st.limit == 3);
}

TEST_CASE("quoting variants") {
  SECTION("single quotes are strings, doubled quote escapes") {
    auto st = parse_select("SELECT 'it''s'");
    CHECK(st.items[0].e->lit.as_str() == "it's");
  }
  SECTION("backticks are identifiers") {
    auto st = parse_select("SELECT `weird name` FROM t");
    CHECK(st.items[0].e->k == expr_kind::column);
    CHECK(st.items[0].e->name == "weird name");
    CHECK(!st.items[0].e->double_quoted);
  }
  SECTION("double quotes are identifiers that may fall back to strings") {
    auto st = parse_select("SELECT \"maybe\" FROM t");
    CHECK(st.items[0].e->k == expr_kind::column);
    CHECK(st.items[0].e->double_quoted);
  }
  SECTION("qualified double-quoted refs never fall back") {
    auto st = parse_select("SELECT t.\"col\" FROM t");
    CHECK(st.items[0].e->k == expr_kind::column);
    CHECK(st.items[0].e->qualifier == "t");
    CHECK(!st.items[0].e->double_quoted);
  }
}

TEST_CASE("operator precedence and variants") {
  SECTION("== normalizes to = and <> to !=") {
    auto a = parse_select("SELECT 1 == 2");
    CHECK(a.items[0].e->op == "=");
    auto b = parse_select("SELECT 1 <> 2");
    CHECK(b.items[0].e->op == "!=");
  }
  SECTION("AND binds tighter than OR") {
    auto st = parse_select("SELECT a OR b AND c FROM t");
    const auto& top = *st.items[0].e;
    CHECK(top.op == "or");
    CHECK(top.args[1]->op == "and");
  }
  SECTION("comparison binds tighter than NOT") {
    auto st = parse_select("SELECT NOT a = b FROM t");
    const auto& top = *st.items[0].e;
    CHECK(top.k == expr_kind::unary);
    CHECK(top.op == "not");
    CHECK(top.args[0]->op == "=");
  }
  SECTION("multiplication binds tighter than addition") {
    auto st = parse_select("SELECT 1 + 2 * 3");
    const auto& top = *st.items[0].e;
    CHECK(top.op == "+");
    CHECK(top.args[1]->op == "*");
  }
  SECTION("IS NULL and IS NOT NULL") {
    auto a = parse_select("SELECT a IS NULL FROM t");
    CHECK(a.items[0].e->k == expr_kind::is_null);
    CHECK(!a.items[0].e->negated);
    auto b = parse_select("SELECT a IS NOT NULL FROM t");
    CHECK(b.items[0].e->k == expr_kind::is_null);
    CHECK(b.items[0].e->negated);
  }
  SECTION("unary minus and modulo") {
    auto st = parse_select("SELECT -a % 3 FROM t");
    CHECK(st.items[0].e->op == "%");
    CHECK(st.items[0].e->args[0]->op == "-");
  }
}

TEST_CASE("joins") {
  SECTION("inner join with ON") {
    auto st = parse_select("SELECT a FROM t JOIN u ON t.x = u.y");
    REQUIRE(st.joins.size() == 1);
    CHECK(st.joins[0].kind == join_kind::inner);
    CHECK(st.joins[0].table.table == "u");
    CHECK(st.joins[0].on->op == "=");
  }
  SECTION("LEFT and LEFT OUTER are the same join") {
    auto a = parse_select("SELECT a FROM t LEFT JOIN u ON t.x = u.y");
    auto b = parse_select("SELECT a FROM t LEFT OUTER JOIN u ON t.x = u.y");
    CHECK(a.joins[0].kind == join_kind::left);
    CHECK(b.joins[0].kind == join_kind::left);
  }
  SECTION("table aliases with and without AS") {
    auto st = parse_select("SELECT a FROM t AS x JOIN u y ON x.a = y.b");
    CHECK(st.from->alias == "x");
    CHECK(st.joins[0].table.alias == "y");
  }
}

TEST_CASE("select list forms") {
  SECTION("star") {
    auto st = parse_select("SELECT * FROM t");
    CHECK(st.items[0].star);
  }
  SECTION("aliases with and without AS") {
    auto st = parse_select("SELECT a AS x, b y FROM t");
    CHECK(st.items[0].alias == "x");
    CHECK(st.items[1].alias == "y");
  }
  SECTION("group by several keys with aggregates") {
    auto st = parse_select(
        "SELECT tool, count(*), sum(turn) FROM t GROUP BY tool, session_id");
    CHECK(st.group_by.size() == 2);
    CHECK(st.items[1].e->k == expr_kind::call);
    CHECK(st.items[1].e->args.size() == 1);
    CHECK(st.items[1].e->args[0]->k == expr_kind::star);
  }
  SECTION("order by positional index ascending by default") {
    auto st = parse_select("SELECT a, b FROM t ORDER BY 2, a DESC");
    REQUIRE(st.order_by.size() == 2);
    CHECK(st.order_by[0].e->k == expr_kind::literal);
    CHECK(!st.order_by[0].desc);
    CHECK(st.order_by[1].desc);
  }
}

TEST_CASE("dialect conveniences") {
  SECTION("comments are skipped") {
    auto st = parse_select("SELECT 1 -- trailing comment\n-- whole line\n, 2");
    CHECK(st.items.size() == 2);
  }
  SECTION("trailing semicolon tolerated") {
    CHECK_NOTHROW(parse_select("SELECT 1;"));
  }
  SECTION("float and exponent literals") {
    auto st = parse_select("SELECT 1.5, 2e3, 0.25");
    CHECK(st.items[0].e->lit.as_f64() == 1.5);
    CHECK(st.items[1].e->lit.as_f64() == 2000.0);
  }
  SECTION("TRUE FALSE NULL literals") {
    auto st = parse_select("SELECT TRUE, false, NULL");
    CHECK(st.items[0].e->lit.as_bool());
    CHECK(!st.items[1].e->lit.as_bool());
    CHECK(st.items[2].e->lit.is_null());
  }
}

TEST_CASE("syntax errors carry a position") {
  SECTION("empty select list") {
    CHECK(code_of([] { parse_select("SELECT"); }) == errc::syntax_error);
  }
  SECTION("missing table after FROM") {
    auto m = msg_of([] { parse_select("SELECT 1 FROM"); });
    CHECK(m.find("position") != std::string::npos);
  }
  SECTION("unterminated string") {
    auto m = msg_of([] { parse_select("SELECT 'oops"); });
    CHECK(m.find("position") != std::string::npos);
  }
  SECTION("negative limit") {
    CHECK(code_of([] { parse_select("SELECT 1 LIMIT -1"); }) == errc::syntax_error);
  }
  SECTION("trailing garbage") {
    CHECK(code_of([] { parse_select("SELECT 1 2 3"); }) == errc::syntax_error);
  }
  SECTION("not a select") {
    CHECK(code_of([] { parse_select("DELETE FROM t"); }) == errc::syntax_error);
  }
  SECTION("lone operator") {
    CHECK(code_of([] { parse_select("SELECT * FROM t WHERE >"); }) ==
          errc::syntax_error);
  }
}
