// Loads an Iceberg table from its metadata file and queries two snapshots of
// the same table side by side through the SQL engine.

#include <cstdio>
#include <string>

#include "rill/engine/backends/iceberg.hpp"
#include "rill/engine/engine.hpp"
#include "rill/iceberg/metadata.hpp"
#include "rill/io/open.hpp"

int main(int argc, char** argv) {
  std::string metadata = argc > 1
                             ? argv[1]
                             : "fixtures/iceberg/posdel/metadata/v1.metadata.json";

  auto log = std::make_shared<rill::io::fetch_log>();
  rill::io::source_opener open{nullptr, log};

  auto meta = rill::iceberg::load_table_metadata(metadata, open);
  std::printf("table %s, %zu snapshots\n", meta.location.c_str(), meta.snapshots.size());

  rill::engine::engine eng;
  eng.set_fetch_log(log);
  eng.register_table(
      "t", std::make_shared<rill::engine::iceberg_backend>(metadata, open));
  for (const auto& snap : meta.snapshots) {
    eng.register_table("t_" + std::to_string(snap.snapshot_id),
                       std::make_shared<rill::engine::iceberg_backend>(
                           metadata, open, snap.snapshot_id));
  }

  auto current = eng.query("SELECT count(*) FROM t");
  std::printf("current snapshot rows: %s\n",
              (*current->next_row())[0].to_display().c_str());

  for (const auto& snap : meta.snapshots) {
    auto h = eng.query("SELECT count(*) FROM t_" + std::to_string(snap.snapshot_id));
    std::printf("snapshot %lld rows: %s\n", static_cast<long long>(snap.snapshot_id),
                (*h->next_row())[0].to_display().c_str());
  }
  return 0;
}
