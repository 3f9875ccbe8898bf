// Reads a Parquet file through the range-IO layer, showing which byte ranges
// the footer and a single projected column actually cost.

#include <cstdio>
#include <string>

#include "rill/io/open.hpp"
#include "rill/parquet/file.hpp"

int main(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : "fixtures/parquet/big_pruning.parquet";

  auto log = std::make_shared<rill::io::fetch_log>();
  rill::io::source_opener open{nullptr, log};
  rill::parquet::parquet_file file(open(path));

  std::printf("%s: %lld rows, %d row groups\n", path.c_str(),
              static_cast<long long>(file.num_rows()), file.num_row_groups());
  for (const auto& name : file.column_names()) std::printf("  column %s\n", name.c_str());

  // Footer statistics prune row groups before any data page is fetched.
  std::vector<rill::parquet::stats_predicate> preds{
      {"id", rill::parquet::cmp_op::ge, rill::value::i64(9000)}};
  auto groups = file.prune_row_groups(preds);
  std::printf("groups surviving id >= 9000: %zu\n", groups.size());

  auto col = file.read_column(file.column_names().front(), &groups);
  std::printf("read %zu values from the surviving groups\n", col.size());

  for (const auto& f : log->snapshot()) {
    std::printf("fetch %-12s offset=%-10lld len=%-8lld bytes=%lld\n",
                std::string(rill::io::fetch_purpose_name(f.purpose)).c_str(),
                static_cast<long long>(f.range ? f.range->offset : -1),
                static_cast<long long>(f.range ? f.range->length : -1),
                static_cast<long long>(f.bytes_returned));
  }
  return 0;
}
