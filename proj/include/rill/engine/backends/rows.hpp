#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rill/engine/backends/memory.hpp"

namespace rill::engine {

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::transport, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// int64 -> double -> string, in that order; empty field is NULL.
inline value infer_csv_value(const std::string& field, bool quoted) {
  if (field.empty() && !quoted) return value::null();
  if (!quoted) {
    try {
      size_t used = 0;
      int64_t i = std::stoll(field, &used);
      if (used == field.size()) return value::i64(i);
    } catch (...) {
    }
    try {
      size_t used = 0;
      double d = std::stod(field, &used);
      if (used == field.size()) return value::f64(d);
    } catch (...) {
    }
  }
  return value::str(field);
}

struct csv_field {
  std::string text;
  bool quoted = false;
};

// One CSV record; quoted fields may contain embedded newlines and "" escapes.
inline std::optional<std::vector<csv_field>> next_csv_record(const std::string& s,
                                                             size_t& pos) {
  if (pos >= s.size()) return std::nullopt;
  std::vector<csv_field> out;
  csv_field cur;
  bool in_quotes = false;
  while (pos < s.size()) {
    char c = s[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < s.size() && s[pos + 1] == '"') {
          cur.text += '"';
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        cur.text += c;
        ++pos;
      }
    } else if (c == '"' && cur.text.empty() && !cur.quoted) {
      cur.quoted = true;
      in_quotes = true;
      ++pos;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur = {};
      ++pos;
    } else if (c == '\r' && pos + 1 < s.size() && s[pos + 1] == '\n') {
      pos += 2;
      out.push_back(std::move(cur));
      return out;
    } else if (c == '\n') {
      ++pos;
      out.push_back(std::move(cur));
      return out;
    } else {
      cur.text += c;
      ++pos;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

// Lines of JSON objects; columns are the union of keys in first-seen order,
// missing keys read as NULL.
inline std::shared_ptr<memory_backend> load_jsonl(const std::string& path) {
  std::string text = detail::read_text_file(path);
  std::vector<std::string> columns;
  std::vector<std::vector<std::pair<std::string, value>>> parsed;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      raise(errc::type_error,
            path + ":" + std::to_string(line_no) + ": expected a JSON object");
    }
    std::vector<std::pair<std::string, value>> fields;
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const auto& c : columns) {
        if (c == it.key()) {
          known = true;
          break;
        }
      }
      if (!known) columns.push_back(it.key());
      fields.emplace_back(it.key(), value::from_json(it.value()));
    }
    parsed.push_back(std::move(fields));
  }
  std::vector<std::vector<value>> rows;
  rows.reserve(parsed.size());
  for (const auto& fields : parsed) {
    std::vector<value> r(columns.size(), value::null());
    for (const auto& [k, v] : fields) {
      for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == k) {
          r[i] = v;
          break;
        }
      }
    }
    rows.push_back(std::move(r));
  }
  return std::make_shared<memory_backend>(std::move(columns), std::move(rows));
}

// First record is the header; field types are inferred per cell.
inline std::shared_ptr<memory_backend> load_csv(const std::string& path) {
  std::string text = detail::read_text_file(path);
  size_t pos = 0;
  auto header = detail::next_csv_record(text, pos);
  if (!header) raise(errc::type_error, path + ": empty csv file");
  std::vector<std::string> columns;
  for (const auto& f : *header) columns.push_back(f.text);
  std::vector<std::vector<value>> rows;
  while (auto rec = detail::next_csv_record(text, pos)) {
    if (rec->size() == 1 && rec->front().text.empty() && !rec->front().quoted) {
      continue;  // blank line
    }
    if (rec->size() != columns.size()) {
      raise(errc::type_error, path + ": row " + std::to_string(rows.size() + 1) +
                                  " has " + std::to_string(rec->size()) +
                                  " fields, header has " +
                                  std::to_string(columns.size()));
    }
    std::vector<value> r;
    r.reserve(rec->size());
    for (const auto& f : *rec) r.push_back(detail::infer_csv_value(f.text, f.quoted));
    rows.push_back(std::move(r));
  }
  return std::make_shared<memory_backend>(std::move(columns), std::move(rows));
}

}  // namespace rill::engine
