#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "cocoon/llm.hpp"
#include "cocoon/pipeline.hpp"

namespace httplib {
class Server;
}

namespace cocoon::service {

struct ServiceConfig {
  llm::ProviderConfig provider;
  std::optional<std::filesystem::path> ui_dir;  // served under /ui when set
  // Builds each session's provider; llm::make_provider when empty.
  std::function<std::shared_ptr<llm::Provider>(const llm::ProviderConfig&)> provider_factory;
};

// HTTP API over in-memory sessions. Routes (all bodies JSON):
//   POST /sessions                      {source | csv, table, docs?} -> {session_id}
//   GET  /sessions/{id}                 document, statuses, alert counts
//   POST /sessions/{id}/run             {until?, wait?} runs in the background
//   PUT  /sessions/{id}/context         {part, value, column?, revision?}
//   PUT  /sessions/{id}/verdicts/{step} {is_error, note}
//   POST /sessions/{id}/query           {q} -> rows
//   GET  /sessions/{id}/export          profile document
//   GET  /sessions/{id}/charts          chart specs
//   GET  /sessions/{id}/report          static HTML page
// 404 unknown session or step, 409 run in progress or stale revision,
// 422 rejected edit (body carries the validator diagnostic).
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks serving requests until stop().
  bool listen();
  void stop();

  // Creates a session directly; used by the HTTP route and by tests.
  std::string create_session(ColumnTable table, std::optional<std::string> docs = std::nullopt);
  std::shared_ptr<pipeline::Session> session(const std::string& id) const;
  // Waits for the background run of a session, if any.
  void wait_for_run(const std::string& id);

 private:
  struct Entry;
  void routes();
  std::shared_ptr<Entry> entry(const std::string& id) const;

  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::size_t next_id_ = 1;
};

}  // namespace cocoon::service
