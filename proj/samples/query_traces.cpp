// Generates the trace corpus, registers it with the engine, and runs the four
// canonical query shapes, printing per-shape call counts and overlap.

#include <cstdio>
#include <iostream>

#include "rill/bench/corpus.hpp"
#include "rill/bench/shapes.hpp"
#include "rill/engine/backends/parquet.hpp"
#include "rill/io/open.hpp"
#include "rill/parquet/file.hpp"

int main() {
  const std::string path = "/tmp/rill_traces.parquet";
  rill::bench::corpus_spec spec;  // 10,000 rows, 8 row groups, every 8th passes
  rill::bench::write_trace_corpus(path, spec);
  std::printf("corpus: %s (%lld rows)\n", path.c_str(),
              static_cast<long long>(spec.rows));

  auto log = std::make_shared<rill::io::fetch_log>();
  rill::io::source_opener open{nullptr, log};
  auto file = std::make_shared<rill::parquet::parquet_file>(open(path));

  rill::engine::engine eng;
  eng.set_fetch_log(log);
  eng.register_table("traces", std::make_shared<rill::engine::parquet_backend>(file));
  rill::bench::register_mock_udfs(eng);  // 5 ms per call, cap 256

  std::vector<rill::bench::shape_result> results;
  for (char shape : {'A', 'B', 'C', 'D'}) {
    results.push_back(rill::bench::run_shape(eng, shape, 50));
  }
  std::cout << rill::bench::render_table(results);

  // Plan-shape laziness: the aggregate never touches a data page.
  auto chunks_before = log->count(rill::io::fetch_purpose::column_chunk);
  auto handle = eng.query("SELECT count(*) FROM traces");
  auto row = handle->next_row();
  std::cout << "count(*) = " << (*row)[0].to_display()
            << ", column chunk fetches = "
            << log->count(rill::io::fetch_purpose::column_chunk) - chunks_before
            << "\n";
  return 0;
}
