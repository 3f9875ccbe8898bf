#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rill/engine/catalog.hpp"
#include "rill/engine/cell.hpp"
#include "rill/parquet/file.hpp"

namespace rill::engine {

// Lazy Parquet table. Each (row group, top-level column) pair gets one shared
// IO cell resolving to the whole decoded column slice; per-row cells are cheap
// extractions from it. A column no forced cell touches generates zero
// column_chunk fetches, and LIMIT-style early termination only ever realizes
// the groups it actually walked into.
class parquet_backend : public scan_backend {
 public:
  explicit parquet_backend(std::shared_ptr<parquet::parquet_file> file)
      : file_(std::move(file)) {}

  std::vector<std::string> columns() override { return file_->column_names(); }

  std::optional<int64_t> exact_row_count() override { return file_->num_rows(); }

  std::unique_ptr<row_source> scan(const scan_request& req) override {
    std::vector<size_t> groups;
    if (req.pushdown.empty()) {
      for (size_t g = 0; g < file_->num_row_groups(); ++g) groups.push_back(g);
    } else {
      std::vector<parquet::stats_predicate> preds;
      for (const auto& p : req.pushdown) {
        if (auto op = to_cmp_op(p.op)) preds.push_back({p.column, *op, p.literal});
      }
      groups = file_->prune_row_groups(preds);
    }
    return std::make_unique<source>(file_, std::move(groups), req);
  }

  const std::shared_ptr<parquet::parquet_file>& file() const { return file_; }

 private:
  static std::optional<parquet::cmp_op> to_cmp_op(pred_op op) {
    switch (op) {
      case pred_op::eq: return parquet::cmp_op::eq;
      case pred_op::lt: return parquet::cmp_op::lt;
      case pred_op::le: return parquet::cmp_op::le;
      case pred_op::gt: return parquet::cmp_op::gt;
      case pred_op::ge: return parquet::cmp_op::ge;
      case pred_op::ne: return std::nullopt;  // statistics cannot refute !=
    }
    return std::nullopt;
  }

  class source : public row_source {
   public:
    source(std::shared_ptr<parquet::parquet_file> file, std::vector<size_t> groups,
           const scan_request& req)
        : file_(std::move(file)),
          groups_(std::move(groups)),
          stats_(req.stats),
          cancel_(req.cancel) {
      names_ = file_->column_names();
    }

    std::optional<row> next() override {
      cancel_.check();
      while (gi_ < groups_.size()) {
        size_t g = groups_[gi_];
        int64_t in_group = file_->footer().row_groups[g].num_rows;
        if (ri_ >= in_group) {
          ++gi_;
          ri_ = 0;
          chunk_cells_.clear();
          continue;
        }
        if (chunk_cells_.empty()) make_chunk_cells(g);
        size_t r = static_cast<size_t>(ri_++);
        row out;
        out.reserve(names_.size());
        for (const auto& cc : chunk_cells_) {
          out.push_back(deferred_cell::make(
              cost_class::cheap, [cc, r]() { return cc->force().as_list()[r]; },
              stats_));
        }
        return out;
      }
      return std::nullopt;
    }

   private:
    void make_chunk_cells(size_t g) {
      chunk_cells_.reserve(names_.size());
      for (const auto& name : names_) {
        chunk_cells_.push_back(deferred_cell::make(
            cost_class::io,
            [file = file_, name, g]() {
              std::vector<size_t> one{g};
              return value::list(file->read_column(name, &one));
            },
            stats_));
      }
    }

    std::shared_ptr<parquet::parquet_file> file_;
    std::vector<size_t> groups_;
    exec_stats* stats_;
    cancel_token cancel_;
    std::vector<std::string> names_;
    size_t gi_ = 0;
    int64_t ri_ = 0;
    std::vector<cell_ptr> chunk_cells_;  // one per column, current group
  };

  std::shared_ptr<parquet::parquet_file> file_;
};

}  // namespace rill::engine
