// cocoon: profile a CSV table, or serve sessions over HTTP.
//
// Exit codes: 0 every step done, 2 some steps failed, 1 fatal error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cocoon/csv.hpp"
#include "cocoon/pipeline.hpp"
#include "cocoon/query.hpp"
#include "cocoon/report.hpp"
#include "cocoon/service.hpp"
#include "cocoon/text_table.hpp"

namespace {

struct ProviderFlags {
  std::string kind = "mock";
  std::string model = "gpt-4o";
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string script;
  std::string transcript;
  int timeout_ms = 60000;
  int max_retries = 3;
  std::size_t max_in_flight = 4;

  void attach(CLI::App& app) {
    app.add_option("--provider", kind, "LLM provider: mock, replay or live")
        ->check(CLI::IsMember({"mock", "replay", "live"}));
    app.add_option("--model", model, "Model name for the live provider");
    app.add_option("--endpoint", endpoint, "OpenAI-compatible chat completions URL");
    app.add_option("--mock-script", script, "Mock script JSON (step id -> responses)");
    app.add_option("--transcript", transcript,
                   "Replay source, or where the live provider records its exchanges");
    app.add_option("--timeout-ms", timeout_ms, "Per-request timeout");
    app.add_option("--max-retries", max_retries, "Validation retries per step");
    app.add_option("--max-in-flight", max_in_flight, "Concurrent LLM requests");
  }

  cocoon::llm::ProviderConfig config() const {
    cocoon::llm::ProviderConfig c;
    c.kind = *cocoon::llm::provider_kind_from_string(kind);
    c.model = model;
    c.endpoint = endpoint;
    c.script_path = script;
    c.transcript_path = transcript;
    c.timeout = std::chrono::milliseconds(timeout_ms);
    c.max_retries = max_retries;
    c.max_in_flight = max_in_flight;
    if (c.kind == cocoon::llm::ProviderKind::Mock && script.empty()) {
      throw cocoon::ConfigError("--provider mock requires --mock-script");
    }
    return c;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cocoon::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cocoon::IoError("cannot write " + path);
  out << content;
}

cocoon::CsvOptions csv_options(const std::string& delimiter) {
  cocoon::CsvOptions opts;
  if (delimiter == "\\t" || delimiter == "tab") {
    opts.delimiter = '\t';
  } else if (delimiter.size() == 1) {
    opts.delimiter = delimiter[0];
  } else {
    throw cocoon::ConfigError("--delimiter must be a single character");
  }
  return opts;
}

struct ProfileCmd {
  std::string input;
  std::string table;
  std::string docs;
  std::string out;
  std::string report;
  std::string until;
  std::string delimiter = ",";
  ProviderFlags provider;

  int run() const {
    using namespace cocoon;
    auto cfg = provider.config();
    auto tbl = load_csv(input, table.empty() ? std::filesystem::path(input).stem().string() : table,
                        csv_options(delimiter));
    std::optional<std::string> doc_text;
    if (!docs.empty()) doc_text = read_file(docs);

    auto base = llm::make_provider(cfg);
    std::shared_ptr<llm::Transcript> transcript;
    if (cfg.kind == llm::ProviderKind::Live && !cfg.transcript_path.empty()) {
      transcript = std::make_shared<llm::Transcript>();
      base = std::make_shared<llm::RecordingProvider>(base, transcript);
    }
    auto client = std::make_shared<llm::LlmClient>(base, cfg);
    pipeline::Session session(std::move(tbl), client, std::move(doc_text));
    auto result = session.run(until.empty() ? std::nullopt : std::optional<std::string>(until));
    if (transcript) transcript->save(cfg.transcript_path);

    const auto state = session.snapshot();
    const auto doc = report::export_document(state);
    if (out.empty()) {
      std::cout << doc.dump();
    } else {
      write_file(out, doc.dump());
    }
    if (!report.empty()) {
      write_file(report, report::render_static_report(
                             doc, report::build_all_charts(*state.table, state.assignment())));
    }
    for (const auto& [id, cause] : result.failed) {
      std::cerr << "step " << id.str() << " failed: " << cause << "\n";
    }
    std::cerr << result.executed.size() << " steps executed, " << result.failed.size()
              << " failed\n";
    return result.ok() ? 0 : 2;
  }
};

struct ServeCmd {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
  ProviderFlags provider;

  int run() const {
    using namespace cocoon;
    service::ServiceConfig cfg;
    cfg.provider = provider.config();
    // Fail fast on a bad provider configuration rather than on the first session.
    llm::make_provider(cfg.provider);
    if (!ui_dir.empty()) cfg.ui_dir = ui_dir;
    service::Service svc(cfg);
    const int bound = svc.bind(host, port);
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    std::cerr << "listening on http://" << host << ":" << bound << "\n";
    return svc.listen() ? 0 : 1;
  }
};

struct QueryCmd {
  std::string input;
  std::string q;
  std::string delimiter = ",";

  int run() const {
    using namespace cocoon;
    const auto tbl = load_csv(input, std::filesystem::path(input).stem().string(),
                              csv_options(delimiter));
    const auto result = query::run_query(q, tbl);
    std::cout << render_text_table(result.columns, result.rows, 60);
    std::cerr << result.rows.size() << " rows\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic table profiler"};
  app.require_subcommand(1);

  ProfileCmd profile;
  auto* p = app.add_subcommand("profile", "Profile a CSV file and write the profile document");
  p->add_option("--input", profile.input, "CSV file")->required();
  p->add_option("--table", profile.table, "Table name (default: file stem)");
  p->add_option("--docs", profile.docs, "Plain-text documentation for the table");
  p->add_option("--out", profile.out, "Profile JSON path (default: stdout)");
  p->add_option("--report", profile.report, "Static HTML report path");
  p->add_option("--until", profile.until, "Only run steps matching this id or glob");
  p->add_option("--delimiter", profile.delimiter, "Field delimiter");
  profile.provider.attach(*p);

  ServeCmd serve;
  auto* s = app.add_subcommand("serve", "Serve the HTTP API");
  s->add_option("--host", serve.host, "Bind address");
  s->add_option("--port", serve.port, "Port (0 picks a free one)");
  s->add_option("--ui-dir", serve.ui_dir, "Built UI assets, served under /ui");
  serve.provider.attach(*s);

  QueryCmd query;
  auto* q = app.add_subcommand("query", "Run a read-only query against a CSV file");
  q->add_option("--input", query.input, "CSV file")->required();
  q->add_option("--delimiter", query.delimiter, "Field delimiter");
  q->add_option("query", query.q, "Query text, e.g. \"SELECT * LIMIT 5\"")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (p->parsed()) return profile.run();
    if (s->parsed()) return serve.run();
    if (q->parsed()) return query.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
