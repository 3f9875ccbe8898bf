// rill: one-shot queries and a small REPL over parquet / iceberg / jsonl / csv
// tables, with fetch-log and stats instrumentation.

#include <atomic>
#include <chrono>
#include <cctype>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rill/bench/mock_llm.hpp"
#include "rill/engine/backends/iceberg.hpp"
#include "rill/engine/backends/parquet.hpp"
#include "rill/engine/backends/rows.hpp"
#include "rill/engine/engine.hpp"
#include "rill/io/open.hpp"
#include "rill/parquet/file.hpp"

namespace {

std::atomic<rill::engine::query_handle*> g_active{nullptr};
std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) {
  g_interrupted.store(true);
  if (auto* h = g_active.load()) h->cancel();
}

int exit_code_for(const rill::error& e) {
  switch (e.code()) {
    case rill::errc::transport:
    case rill::errc::range_out_of_bounds:
    case rill::errc::empty_file:
      return 3;
    case rill::errc::cancelled:
      return 130;
    default:
      return 2;
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string local_path_of(const std::string& uri) {
  if (uri.rfind("file://", 0) == 0) return uri.substr(7);
  if (uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0) {
    rill::raise(rill::errc::transport,
                "jsonl/csv adapters load local files only: " + uri);
  }
  return uri;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string render_cell(const rill::value& v) {
  return v.is_null() ? "" : v.to_display();
}

struct output_writer {
  std::string format = "table";
  std::vector<std::string> columns;
  bool header_done = false;

  void row(const std::vector<rill::value>& vals) {
    if (format == "jsonl") {
      nlohmann::json obj = nlohmann::json::object();
      for (size_t i = 0; i < vals.size(); ++i) obj[columns[i]] = vals[i].to_json();
      std::cout << obj.dump() << "\n";
    } else if (format == "csv") {
      emit_header_once(',');
      for (size_t i = 0; i < vals.size(); ++i) {
        if (i) std::cout << ',';
        std::cout << csv_escape(render_cell(vals[i]));
      }
      std::cout << "\n";
    } else {
      emit_header_once('\t');
      for (size_t i = 0; i < vals.size(); ++i) {
        if (i) std::cout << '\t';
        std::cout << vals[i].to_display();
      }
      std::cout << "\n";
    }
    std::cout.flush();  // rows must be visible as they materialize
  }

  void emit_header_once(char sep) {
    if (header_done) return;
    header_done = true;
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) std::cout << sep;
      std::cout << (format == "csv" ? csv_escape(columns[i]) : columns[i]);
    }
    std::cout << "\n";
  }
};

struct cli_config {
  std::vector<std::string> registrations;
  std::string format = "table";
  std::string fetch_log_path;
  bool stats = false;
  double mock_llm_delay_ms = 5.0;
  int concurrency = 256;
  std::string error_mode = "fail";
  std::string fetch_hook_config;
  std::vector<std::string> params;
};

rill::io::fetch_hook make_hook(const std::string& config_path) {
  if (config_path.empty()) return nullptr;
  std::ifstream in(config_path);
  if (!in) rill::raise(rill::errc::transport, "cannot open " + config_path);
  nlohmann::json cfg = nlohmann::json::parse(in);
  auto base = rill::io::make_default_http_hook();
  auto rules = std::make_shared<std::vector<
      std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>>();
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::vector<std::pair<std::string, std::string>> headers;
    for (auto h = it.value().begin(); h != it.value().end(); ++h) {
      headers.emplace_back(h.key(), h.value().get<std::string>());
    }
    rules->emplace_back(it.key(), std::move(headers));
  }
  return [base, rules](const rill::io::fetch_request& req) {
    rill::io::fetch_request r = req;
    for (const auto& [prefix, headers] : *rules) {
      if (r.url.rfind(prefix, 0) == 0) {
        for (const auto& h : headers) r.headers.push_back(h);
      }
    }
    return base(r);
  };
}

void register_uri(rill::engine::engine& eng, const rill::io::source_opener& open,
                  const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    rill::raise(rill::errc::bind_error, "--register expects name=URI: " + spec);
  }
  std::string name = spec.substr(0, eq);
  std::string uri = spec.substr(eq + 1);
  if (ends_with(uri, ".parquet")) {
    auto pf = std::make_shared<rill::parquet::parquet_file>(open(uri));
    eng.register_table(name, std::make_shared<rill::engine::parquet_backend>(pf));
  } else if (ends_with(uri, "metadata.json")) {
    eng.register_table(name,
                       std::make_shared<rill::engine::iceberg_backend>(uri, open));
  } else if (ends_with(uri, ".jsonl")) {
    eng.register_table(name, rill::engine::load_jsonl(local_path_of(uri)));
  } else if (ends_with(uri, ".csv")) {
    eng.register_table(name, rill::engine::load_csv(local_path_of(uri)));
  } else {
    rill::raise(rill::errc::bind_error,
                "cannot infer backend for '" + uri +
                    "' (.parquet, metadata.json, .jsonl, .csv)");
  }
}

rill::engine::param_map parse_params(const std::vector<std::string>& specs) {
  rill::engine::param_map out;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      rill::raise(rill::errc::bind_error, "--param expects name=value: " + spec);
    }
    std::string name = spec.substr(0, eq);
    std::string raw = spec.substr(eq + 1);
    nlohmann::json j = nlohmann::json::parse(raw, nullptr, false);
    out[name] = j.is_discarded() ? rill::value::str(raw) : rill::value::from_json(j);
  }
  return out;
}

// Runs one statement, streaming rows; returns the process exit code for it.
int run_statement(rill::engine::engine& eng, const std::string& sql,
                  const rill::engine::param_map& params, const cli_config& cfg,
                  nlohmann::json* last_stats) {
  try {
    auto plan = eng.plan(sql);
    auto handle = eng.execute(plan, params);
    g_active.store(handle.get());
    output_writer out;
    out.format = cfg.format;
    out.columns = handle->columns();
    int code = 0;
    try {
      while (auto row = handle->next_row()) out.row(*row);
    } catch (...) {
      g_active.store(nullptr);
      throw;
    }
    g_active.store(nullptr);
    if (last_stats) *last_stats = handle->stats_json();
    if (cfg.stats) std::cerr << handle->stats_json().dump(2) << "\n";
    return code;
  } catch (const rill::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

void dump_fetch_log(const rill::io::fetch_log_ptr& log, const std::string& path) {
  if (path.empty()) return;
  std::string text = log->to_jsonl();
  if (path == "-") {
    std::cerr << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write fetch log to " << path << "\n";
    return;
  }
  out << text;
}

int repl(rill::engine::engine& eng, const rill::engine::param_map& params,
         const cli_config& cfg) {
  nlohmann::json last_stats;
  std::string line;
  while (true) {
    std::cerr << "rill> " << std::flush;
    if (!std::getline(std::cin, line)) {
      if (g_interrupted.exchange(false)) {  // ^C at the prompt: new prompt
        std::cin.clear();
        std::cerr << "\n";
        continue;
      }
      break;  // EOF
    }
    g_interrupted.store(false);
    if (line.empty()) continue;
    if (line == ".exit" || line == ".quit") break;
    if (line == ".stats") {
      std::cout << (last_stats.is_null() ? "{}" : last_stats.dump(2)) << "\n";
      continue;
    }
    if (line == ".tables") {
      for (const auto& t : eng.tables()) std::cout << t << "\n";
      continue;
    }
    run_statement(eng, line, params, cfg, &last_stats);  // errors print, loop continues
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query parquet, iceberg, jsonl, and csv tables"};
  app.validate_optional_arguments();  // greedy gathering must stop at the sql positional
  CLI::Validator kv(
      [](std::string& s) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) return "expected name=value, got: " + s;
        for (size_t i = 0; i < eq; ++i) {
          unsigned char c = static_cast<unsigned char>(s[i]);
          if (!(std::isalnum(c) || c == '_')) return "expected name=value, got: " + s;
        }
        return std::string{};
      },
      "NAME=VALUE", "kv");
  cli_config cfg;
  std::string sql;
  app.add_option("sql", sql, "statement to run (omit for a repl)");
  app.add_option("--register", cfg.registrations,
                 "name=URI (.parquet, metadata.json, .jsonl, .csv)")
      ->check(kv);
  app.add_option("--format", cfg.format, "table, jsonl, or csv")
      ->check(CLI::IsMember({"table", "jsonl", "csv"}));
  app.add_option("--fetch-log", cfg.fetch_log_path, "write fetch events as jsonl ('-' = stderr)");
  app.add_flag("--stats", cfg.stats, "print exec stats to stderr after each query");
  app.add_option("--mock-llm-delay-ms", cfg.mock_llm_delay_ms, "mock llm per-call delay");
  app.add_option("--concurrency", cfg.concurrency, "mock llm concurrency cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--error-mode", cfg.error_mode, "fail or null")
      ->check(CLI::IsMember({"fail", "null"}));
  app.add_option("--fetch-hook-config", cfg.fetch_hook_config,
                 "json map of url prefix -> static headers");
  app.add_option("--param", cfg.params, "name=value bound to $name (json or string)")
      ->check(kv);
  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, on_sigint);

  auto log = std::make_shared<rill::io::fetch_log>();
  rill::engine::engine eng;
  eng.set_fetch_log(log);
  if (cfg.error_mode == "null") eng.set_error_mode(rill::engine::error_mode::null);

  int code = 0;
  rill::engine::param_map params;
  try {
    rill::io::source_opener open{make_hook(cfg.fetch_hook_config), log};
    for (const auto& reg : cfg.registrations) register_uri(eng, open, reg);
    rill::bench::mock_llm_config mock;
    mock.delay = std::chrono::microseconds(
        static_cast<int64_t>(cfg.mock_llm_delay_ms * 1000.0));
    rill::bench::register_mock_udfs(eng, mock, cfg.concurrency);
    params = parse_params(cfg.params);
  } catch (const rill::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!sql.empty()) {
    code = run_statement(eng, sql, params, cfg, nullptr);
  } else {
    code = repl(eng, params, cfg);
  }
  dump_fetch_log(log, cfg.fetch_log_path);
  return code;
}
