#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rill/engine/catalog.hpp"
#include "rill/engine/cell.hpp"

namespace rill::engine {

// Fully materialized table: rows are served as pre-resolved cells. Pushdown is
// ignored (the engine re-applies the whole filter anyway).
class memory_backend : public scan_backend {
 public:
  memory_backend(std::vector<std::string> columns, std::vector<std::vector<value>> rows)
      : columns_(std::move(columns)), rows_(std::make_shared<table>(std::move(rows))) {
    for (const auto& r : rows_->data) {
      if (r.size() != columns_.size()) {
        raise(errc::type_error, "memory table: ragged row");
      }
    }
  }

  std::vector<std::string> columns() override { return columns_; }

  std::optional<int64_t> exact_row_count() override {
    return static_cast<int64_t>(rows_->data.size());
  }

  std::unique_ptr<row_source> scan(const scan_request& req) override {
    return std::make_unique<source>(rows_, req.cancel);
  }

 private:
  struct table {
    explicit table(std::vector<std::vector<value>> d) : data(std::move(d)) {}
    std::vector<std::vector<value>> data;
  };

  class source : public row_source {
   public:
    source(std::shared_ptr<table> t, cancel_token cancel)
        : t_(std::move(t)), cancel_(std::move(cancel)) {}

    std::optional<row> next() override {
      cancel_.check();
      if (at_ >= t_->data.size()) return std::nullopt;
      const auto& vals = t_->data[at_++];
      row out;
      out.reserve(vals.size());
      for (const auto& v : vals) out.push_back(deferred_cell::make_resolved(v));
      return out;
    }

   private:
    std::shared_ptr<table> t_;
    cancel_token cancel_;
    size_t at_ = 0;
  };

  std::vector<std::string> columns_;
  std::shared_ptr<table> rows_;
};

}  // namespace rill::engine
