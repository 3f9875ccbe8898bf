#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "rill/common.hpp"
#include "rill/engine/ast.hpp"

namespace rill::engine {

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

enum class tok_kind : uint8_t {
  end,
  ident,    // bare word or `backticked`
  dquoted,  // "..." — identifier that may fall back to a string literal
  number,
  string,  // '...'
  param,   // $name
  punct,   // operators and separators, text holds the exact spelling
};

struct token {
  tok_kind k = tok_kind::end;
  std::string text;
  size_t pos = 0;
  value num;  // number tokens only
};

// Permissive tokenizer: case-insensitive keywords are resolved by the parser,
// both quote styles accepted, `--` comments skipped.
class lexer {
 public:
  explicit lexer(std::string_view sql) : sql_(sql) { scan_all(); }

  const std::vector<token>& tokens() const { return toks_; }

 private:
  [[noreturn]] void fail(size_t pos, const std::string& what) {
    raise(errc::syntax_error, what + " at position " + std::to_string(pos));
  }

  void scan_all() {
    size_t i = 0;
    size_t n = sql_.size();
    while (i < n) {
      char c = sql_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '-' && i + 1 < n && sql_[i + 1] == '-') {
        while (i < n && sql_[i] != '\n') ++i;
        continue;
      }
      size_t start = i;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < n && (std::isalnum(static_cast<unsigned char>(sql_[i])) || sql_[i] == '_')) {
          ++i;
        }
        push(tok_kind::ident, std::string(sql_.substr(start, i - start)), start);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql_[i + 1])))) {
        scan_number(i);
        continue;
      }
      if (c == '\'') {
        scan_string(i, '\'', tok_kind::string);
        continue;
      }
      if (c == '"') {
        scan_string(i, '"', tok_kind::dquoted);
        continue;
      }
      if (c == '`') {
        scan_string(i, '`', tok_kind::ident);
        continue;
      }
      if (c == '$') {
        ++i;
        size_t name_start = i;
        while (i < n && (std::isalnum(static_cast<unsigned char>(sql_[i])) || sql_[i] == '_')) {
          ++i;
        }
        if (i == name_start) fail(start, "expected parameter name after '$'");
        push(tok_kind::param, std::string(sql_.substr(name_start, i - name_start)), start);
        continue;
      }
      // multi-char operators first
      if (i + 1 < n) {
        std::string two(sql_.substr(i, 2));
        if (two == "<=" || two == ">=" || two == "!=" || two == "<>" || two == "==") {
          push(tok_kind::punct, two == "==" ? "=" : two, start);
          i += 2;
          continue;
        }
      }
      static const std::string singles = "=<>+-*/%(),.;";
      if (singles.find(c) != std::string::npos) {
        push(tok_kind::punct, std::string(1, c), start);
        ++i;
        continue;
      }
      fail(start, std::string("unexpected character '") + c + "'");
    }
    push(tok_kind::end, "", n);
  }

  void scan_number(size_t& i) {
    size_t start = i;
    size_t n = sql_.size();
    bool is_float = false;
    while (i < n && std::isdigit(static_cast<unsigned char>(sql_[i]))) ++i;
    if (i < n && sql_[i] == '.') {
      is_float = true;
      ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(sql_[i]))) ++i;
    }
    if (i < n && (sql_[i] == 'e' || sql_[i] == 'E')) {
      size_t save = i;
      ++i;
      if (i < n && (sql_[i] == '+' || sql_[i] == '-')) ++i;
      if (i < n && std::isdigit(static_cast<unsigned char>(sql_[i]))) {
        is_float = true;
        while (i < n && std::isdigit(static_cast<unsigned char>(sql_[i]))) ++i;
      } else {
        i = save;  // not an exponent; leave the 'e' for the next token
      }
    }
    std::string text(sql_.substr(start, i - start));
    token t;
    t.k = tok_kind::number;
    t.text = text;
    t.pos = start;
    if (is_float) {
      t.num = value::f64(std::strtod(text.c_str(), nullptr));
    } else {
      errno = 0;
      long long v = std::strtoll(text.c_str(), nullptr, 10);
      if (errno == ERANGE) t.num = value::f64(std::strtod(text.c_str(), nullptr));
      else t.num = value::i64(v);
    }
    toks_.push_back(std::move(t));
  }

  void scan_string(size_t& i, char quote, tok_kind kind) {
    size_t start = i;
    ++i;  // opening quote
    std::string out;
    size_t n = sql_.size();
    while (i < n) {
      char c = sql_[i];
      if (c == quote) {
        if (i + 1 < n && sql_[i + 1] == quote) {  // doubled quote escapes itself
          out.push_back(quote);
          i += 2;
          continue;
        }
        ++i;
        push(kind, std::move(out), start);
        return;
      }
      out.push_back(c);
      ++i;
    }
    fail(start, "unterminated quote");
  }

  void push(tok_kind k, std::string text, size_t pos) {
    token t;
    t.k = k;
    t.text = std::move(text);
    t.pos = pos;
    toks_.push_back(std::move(t));
  }

  std::string_view sql_;
  std::vector<token> toks_;
};

}  // namespace detail

// Recursive-descent parser for the SELECT dialect. Every failure is a
// SyntaxError carrying the byte offset it was detected at.
class parser {
 public:
  explicit parser(std::string_view sql) : lex_(sql) {}

  select_stmt parse() {
    select_stmt stmt = parse_select();
    accept_punct(";");
    if (peek().k != detail::tok_kind::end) {
      fail(peek().pos, "unexpected trailing input '" + peek().text + "'");
    }
    return stmt;
  }

 private:
  using tok_kind = detail::tok_kind;
  using token = detail::token;

  [[noreturn]] void fail(size_t pos, const std::string& what) {
    raise(errc::syntax_error, what + " at position " + std::to_string(pos));
  }

  const token& peek(size_t ahead = 0) const {
    size_t i = at_ + ahead;
    const auto& toks = lex_.tokens();
    return i < toks.size() ? toks[i] : toks.back();
  }

  token take() { return lex_.tokens()[at_ < lex_.tokens().size() - 1 ? at_++ : at_]; }

  bool peek_kw(const char* kw, size_t ahead = 0) const {
    const token& t = peek(ahead);
    return t.k == tok_kind::ident && detail::lower(t.text) == kw;
  }

  bool accept_kw(const char* kw) {
    if (!peek_kw(kw)) return false;
    take();
    return true;
  }

  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) {
      fail(peek().pos, std::string("expected ") + kw + ", got '" + peek().text + "'");
    }
  }

  bool accept_punct(const char* p) {
    if (peek().k != tok_kind::punct || peek().text != p) return false;
    take();
    return true;
  }

  void expect_punct(const char* p) {
    if (!accept_punct(p)) {
      fail(peek().pos, std::string("expected '") + p + "', got '" +
                           (peek().k == tok_kind::end ? "end of input" : peek().text) + "'");
    }
  }

  static bool is_keyword(const std::string& lowered) {
    static const char* kws[] = {"select", "from",  "where", "group", "by",   "order",
                                "limit",  "as",    "join",  "inner", "left", "on",
                                "and",    "or",    "not",   "is",    "null", "true",
                                "false",  "asc",   "desc"};
    for (const char* k : kws) {
      if (lowered == k) return true;
    }
    return false;
  }

  select_stmt parse_select() {
    expect_kw("select");
    select_stmt stmt;
    stmt.items.push_back(parse_item());
    while (accept_punct(",")) stmt.items.push_back(parse_item());
    if (accept_kw("from")) {
      stmt.from = parse_table_ref();
      for (;;) {
        join_clause jc;
        jc.pos = peek().pos;
        if (accept_kw("inner")) {
          jc.kind = join_kind::inner;
          expect_kw("join");
        } else if (accept_kw("left")) {
          jc.kind = join_kind::left;
          accept_kw("outer");
          expect_kw("join");
        } else if (accept_kw("join")) {
          jc.kind = join_kind::inner;
        } else {
          break;
        }
        jc.table = parse_table_ref();
        expect_kw("on");
        jc.on = parse_expr();
        stmt.joins.push_back(std::move(jc));
      }
    }
    if (accept_kw("where")) stmt.where = parse_expr();
    if (accept_kw("group")) {
      expect_kw("by");
      stmt.group_by.push_back(parse_expr());
      while (accept_punct(",")) stmt.group_by.push_back(parse_expr());
    }
    if (accept_kw("order")) {
      expect_kw("by");
      for (;;) {
        order_item oi;
        oi.e = parse_expr();
        if (accept_kw("desc")) oi.desc = true;
        else accept_kw("asc");
        stmt.order_by.push_back(std::move(oi));
        if (!accept_punct(",")) break;
      }
    }
    if (accept_kw("limit")) {
      const token& t = peek();
      if (t.k != tok_kind::number || t.num.type() != value::kind::i64) {
        fail(t.pos, "expected integer after LIMIT");
      }
      take();
      if (t.num.as_i64() < 0) fail(t.pos, "LIMIT must be non-negative");
      stmt.limit = t.num.as_i64();
    }
    return stmt;
  }

  select_item parse_item() {
    select_item item;
    item.pos = peek().pos;
    if (peek().k == tok_kind::punct && peek().text == "*") {
      take();
      item.star = true;
      return item;
    }
    item.e = parse_expr();
    if (accept_kw("as")) {
      item.alias = expect_name("alias");
    } else if (peek().k == tok_kind::ident && !is_keyword(detail::lower(peek().text))) {
      item.alias = take().text;
    } else if (peek().k == tok_kind::dquoted) {
      item.alias = take().text;
    }
    return item;
  }

  std::string expect_name(const char* what) {
    const token& t = peek();
    if (t.k == tok_kind::ident || t.k == tok_kind::dquoted) {
      if (t.k == tok_kind::ident && is_keyword(detail::lower(t.text))) {
        fail(t.pos, std::string("expected ") + what + ", got keyword '" + t.text + "'");
      }
      return take().text;
    }
    fail(t.pos, std::string("expected ") + what + ", got '" + t.text + "'");
  }

  table_ref parse_table_ref() {
    table_ref ref;
    ref.pos = peek().pos;
    ref.table = expect_name("table name");
    ref.alias = ref.table;
    if (accept_kw("as")) {
      ref.alias = expect_name("table alias");
    } else if (peek().k == tok_kind::ident && !is_keyword(detail::lower(peek().text))) {
      ref.alias = take().text;
    }
    return ref;
  }

  expr_ptr parse_expr() { return parse_or(); }

  expr_ptr parse_or() {
    expr_ptr e = parse_and();
    while (peek_kw("or")) {
      size_t pos = take().pos;
      auto node = make_expr(expr_kind::binary, pos);
      node->op = "or";
      node->args = {e, parse_and()};
      e = node;
    }
    return e;
  }

  expr_ptr parse_and() {
    expr_ptr e = parse_not();
    while (peek_kw("and")) {
      size_t pos = take().pos;
      auto node = make_expr(expr_kind::binary, pos);
      node->op = "and";
      node->args = {e, parse_not()};
      e = node;
    }
    return e;
  }

  expr_ptr parse_not() {
    if (peek_kw("not")) {
      size_t pos = take().pos;
      auto node = make_expr(expr_kind::unary, pos);
      node->op = "not";
      node->args = {parse_not()};
      return node;
    }
    return parse_comparison();
  }

  expr_ptr parse_comparison() {
    expr_ptr e = parse_additive();
    if (peek_kw("is")) {
      size_t pos = take().pos;
      auto node = make_expr(expr_kind::is_null, pos);
      node->negated = accept_kw("not");
      expect_kw("null");
      node->args = {e};
      return node;
    }
    if (peek().k == tok_kind::punct) {
      const std::string& p = peek().text;
      if (p == "=" || p == "!=" || p == "<>" || p == "<" || p == "<=" || p == ">" ||
          p == ">=") {
        size_t pos = take().pos;
        auto node = make_expr(expr_kind::binary, pos);
        node->op = (p == "<>") ? "!=" : p;
        node->args = {e, parse_additive()};
        return node;
      }
    }
    return e;
  }

  expr_ptr parse_additive() {
    expr_ptr e = parse_multiplicative();
    while (peek().k == tok_kind::punct && (peek().text == "+" || peek().text == "-")) {
      token t = take();
      auto node = make_expr(expr_kind::binary, t.pos);
      node->op = t.text;
      node->args = {e, parse_multiplicative()};
      e = node;
    }
    return e;
  }

  expr_ptr parse_multiplicative() {
    expr_ptr e = parse_unary();
    while (peek().k == tok_kind::punct &&
           (peek().text == "*" || peek().text == "/" || peek().text == "%")) {
      token t = take();
      auto node = make_expr(expr_kind::binary, t.pos);
      node->op = t.text;
      node->args = {e, parse_unary()};
      e = node;
    }
    return e;
  }

  expr_ptr parse_unary() {
    if (peek().k == tok_kind::punct && peek().text == "-") {
      size_t pos = take().pos;
      auto node = make_expr(expr_kind::unary, pos);
      node->op = "-";
      node->args = {parse_unary()};
      return node;
    }
    return parse_primary();
  }

  expr_ptr parse_primary() {
    const token& t = peek();
    switch (t.k) {
      case tok_kind::number: {
        auto e = make_expr(expr_kind::literal, t.pos);
        e->lit = take().num;
        return e;
      }
      case tok_kind::string: {
        auto e = make_expr(expr_kind::literal, t.pos);
        e->lit = value::str(take().text);
        return e;
      }
      case tok_kind::param: {
        auto e = make_expr(expr_kind::param, t.pos);
        e->name = take().text;
        return e;
      }
      case tok_kind::punct:
        if (t.text == "(") {
          take();
          expr_ptr e = parse_expr();
          expect_punct(")");
          return e;
        }
        if (t.text == "*") {
          take();
          return make_expr(expr_kind::star, t.pos);
        }
        fail(t.pos, "expected expression, got '" + t.text + "'");
      case tok_kind::dquoted:
      case tok_kind::ident:
        return parse_name();
      case tok_kind::end:
        fail(t.pos, "expected expression, got end of input");
    }
    fail(t.pos, "expected expression");
  }

  expr_ptr parse_name() {
    token t = take();
    std::string lowered = detail::lower(t.text);
    if (t.k == tok_kind::ident) {
      if (lowered == "null") {
        auto e = make_expr(expr_kind::literal, t.pos);
        return e;
      }
      if (lowered == "true" || lowered == "false") {
        auto e = make_expr(expr_kind::literal, t.pos);
        e->lit = value::boolean(lowered == "true");
        return e;
      }
      if (is_keyword(lowered)) {
        fail(t.pos, "unexpected keyword '" + t.text + "'");
      }
    }
    // function call
    if (peek().k == tok_kind::punct && peek().text == "(") {
      take();
      auto e = make_expr(expr_kind::call, t.pos);
      e->name = t.text;
      if (!accept_punct(")")) {
        e->args.push_back(parse_expr());
        while (accept_punct(",")) e->args.push_back(parse_expr());
        expect_punct(")");
      }
      return e;
    }
    // column ref, possibly qualified
    auto e = make_expr(expr_kind::column, t.pos);
    e->double_quoted = (t.k == tok_kind::dquoted);
    if (accept_punct(".")) {
      e->qualifier = t.text;
      e->name = expect_name("column name");
      e->double_quoted = false;  // a qualified ref is unambiguously a column
    } else {
      e->name = t.text;
    }
    return e;
  }

  detail::lexer lex_;
  size_t at_ = 0;
};

inline select_stmt parse_select(std::string_view sql) { return parser(sql).parse(); }

}  // namespace rill::engine
