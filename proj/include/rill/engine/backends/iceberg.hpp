#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rill/engine/backends/memory.hpp"
#include "rill/engine/catalog.hpp"
#include "rill/iceberg/metadata.hpp"
#include "rill/iceberg/scan.hpp"
#include "rill/io/open.hpp"

namespace rill::engine {

// Materializing adapter: delete-file merging needs whole data files anyway, so
// the snapshot's surviving rows load once on first scan and are then served as
// resolved cells. The per-cell laziness guarantees belong to the Parquet
// backend; this one trades them for correct snapshot semantics.
class iceberg_backend : public scan_backend {
 public:
  iceberg_backend(std::string metadata_uri, io::source_opener open,
                  std::optional<int64_t> snapshot_id = std::nullopt)
      : uri_(std::move(metadata_uri)), open_(std::move(open)), snapshot_id_(snapshot_id) {
    meta_ = std::make_unique<iceberg::table_metadata>(
        iceberg::load_table_metadata(uri_, open_));
    const iceberg::snapshot_info& snap =
        snapshot_id_ ? iceberg::resolve_snapshot(*meta_, *snapshot_id_)
                     : iceberg::resolve_snapshot(*meta_, iceberg::current_snapshot);
    snap_ = snap;
    for (const auto& f : meta_->schema_for(snap_).fields) columns_.push_back(f.name);
  }

  std::vector<std::string> columns() override { return columns_; }

  std::optional<int64_t> exact_row_count() override {
    std::lock_guard lock(mu_);
    if (!rows_) return std::nullopt;  // unknown until the deletes are merged
    return static_cast<int64_t>(rows_->size());
  }

  std::unique_ptr<row_source> scan(const scan_request& req) override {
    ensure_rows();
    return std::make_unique<source>(rows_, req.cancel);
  }

  int64_t snapshot_id() const { return snap_.snapshot_id; }

 private:
  class source : public row_source {
   public:
    source(std::shared_ptr<const std::vector<std::vector<value>>> rows,
           cancel_token cancel)
        : rows_(std::move(rows)), cancel_(std::move(cancel)) {}

    std::optional<row> next() override {
      cancel_.check();
      if (at_ >= rows_->size()) return std::nullopt;
      const auto& vals = (*rows_)[at_++];
      row out;
      out.reserve(vals.size());
      for (const auto& v : vals) out.push_back(deferred_cell::make_resolved(v));
      return out;
    }

   private:
    std::shared_ptr<const std::vector<std::vector<value>>> rows_;
    cancel_token cancel_;
    size_t at_ = 0;
  };

  void ensure_rows() {
    std::lock_guard lock(mu_);
    if (rows_) return;
    auto result = iceberg::scan_table(*meta_, snap_, open_);
    rows_ = std::make_shared<const std::vector<std::vector<value>>>(std::move(result.rows));
  }

  std::string uri_;
  io::source_opener open_;
  std::optional<int64_t> snapshot_id_;
  std::unique_ptr<iceberg::table_metadata> meta_;
  iceberg::snapshot_info snap_;
  std::vector<std::string> columns_;
  std::mutex mu_;
  std::shared_ptr<const std::vector<std::vector<value>>> rows_;
};

}  // namespace rill::engine
