#include "cocoon/service.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>

#include "cocoon/csv.hpp"
#include "cocoon/query.hpp"
#include "cocoon/report.hpp"

namespace cocoon::service {

namespace {

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, Json extra = {}) {
  Json body = {{"error", message}};
  if (extra.is_object()) {
    for (auto& [k, v] : extra.items()) body[k] = v;
  }
  send(res, status, body);
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) {
      send_error(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const Json::parse_error& e) {
    send_error(res, 400, std::string("invalid JSON body: ") + e.what());
    return std::nullopt;
  }
}

Json statuses_json(const pipeline::SessionState& state) {
  Json out = Json::object();
  for (const auto& p : pipeline::plan_steps(state)) {
    out[p.id.str()] = std::string(pipeline::to_string(state.status(p.id)));
  }
  return out;
}

Json report_json(const pipeline::RunReport& r) {
  Json executed = Json::array();
  for (const auto& id : r.executed) executed.push_back(id.str());
  Json failed = Json::object();
  for (const auto& [id, cause] : r.failed) failed[id.str()] = cause;
  return {{"executed", std::move(executed)}, {"failed", std::move(failed)}};
}

}  // namespace

struct Service::Entry {
  std::shared_ptr<pipeline::Session> session;
  std::mutex mu;
  std::thread runner;
  std::atomic<bool> busy{false};
  std::optional<pipeline::RunReport> last_report;

  ~Entry() {
    if (runner.joinable()) runner.join();
  }
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() {
  stop();
  std::lock_guard lock(mu_);
  sessions_.clear();
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_->is_running()) server_->stop();
}

std::string Service::create_session(ColumnTable table, std::optional<std::string> docs) {
  // Each session gets a fresh provider so mock scripts are consumed per session.
  auto provider = config_.provider_factory ? config_.provider_factory(config_.provider)
                                           : llm::make_provider(config_.provider);
  auto client = std::make_shared<llm::LlmClient>(std::move(provider), config_.provider);
  auto e = std::make_shared<Entry>();
  e->session = std::make_shared<pipeline::Session>(std::move(table), client, std::move(docs));
  std::lock_guard lock(mu_);
  std::string id = "s" + std::to_string(next_id_++);
  sessions_[id] = std::move(e);
  return id;
}

std::shared_ptr<Service::Entry> Service::entry(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<pipeline::Session> Service::session(const std::string& id) const {
  auto e = entry(id);
  return e ? e->session : nullptr;
}

void Service::wait_for_run(const std::string& id) {
  auto e = entry(id);
  if (!e) return;
  std::lock_guard lock(e->mu);
  if (e->runner.joinable()) e->runner.join();
}

void Service::routes() {
  auto& srv = *server_;

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    } catch (...) {
      send_error(res, 500, "unknown error");
    }
  });

  if (config_.ui_dir) srv.set_mount_point("/ui", config_.ui_dir->string());

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send(res, 200, {{"ok", true}});
  });

  srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    const std::string name = body->value("table", "");
    if (name.empty()) return send_error(res, 400, "field \"table\" is required");
    std::optional<std::string> docs;
    if (body->contains("docs") && (*body)["docs"].is_string()) docs = (*body)["docs"].get<std::string>();
    try {
      ColumnTable table = [&] {
        if (body->contains("csv")) return parse_csv((*body)["csv"].get<std::string>(), name);
        const std::string source = body->value("source", "");
        if (source.empty()) throw ConfigError("field \"source\" or \"csv\" is required");
        return load_csv(source, name);
      }();
      const std::string id = create_session(std::move(table), std::move(docs));
      send(res, 201, {{"session_id", id}});
    } catch (const Error& e) {
      send_error(res, 400, e.what());
    }
  });

  srv.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    const auto state = e->session->snapshot();
    Json body = {{"session_id", req.matches[1].str()},
                 {"revision", state.revision},
                 {"running", e->session->running() || e->busy.load()}};
    try {
      body["document"] = report::export_document(state).to_json();
    } catch (const NothingToExport&) {
      body["document"] = nullptr;
    }
    body["statuses"] = statuses_json(state);
    body["alert_counts"] = pipeline::alert_counts(state).to_json();
    body["columns"] = state.table->column_names();
    send(res, 200, body);
  });

  srv.Post(R"(/sessions/([^/]+)/run)", [this](const httplib::Request& req,
                                              httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    auto body = parse_body(req, res);
    if (!body) return;
    std::optional<std::string> until;
    if (body->contains("until") && (*body)["until"].is_string()) {
      until = (*body)["until"].get<std::string>();
    }
    const bool wait = body->value("wait", false);
    std::lock_guard lock(e->mu);
    if (e->busy.exchange(true)) return send_error(res, 409, "a run is already in progress");
    if (e->runner.joinable()) e->runner.join();
    if (wait) {
      try {
        auto report = e->session->run(until);
        e->last_report = report;
        e->busy = false;
        return send(res, 200, report_json(report));
      } catch (const ConflictError& err) {
        e->busy = false;
        return send_error(res, 409, err.what());
      }
    }
    e->runner = std::thread([e, until] {
      try {
        e->last_report = e->session->run(until);
      } catch (const std::exception&) {
      }
      e->busy = false;
    });
    send(res, 202, {{"started", true}});
  });

  srv.Put(R"(/sessions/([^/]+)/context)", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    auto body = parse_body(req, res);
    if (!body) return;
    if (e->busy || e->session->running()) return send_error(res, 409, "a run is in progress");
    if (body->contains("revision") && !(*body)["revision"].is_number_unsigned()) {
      return send_error(res, 400, "revision must be a non-negative integer");
    }
    if (body->contains("revision") &&
        (*body)["revision"].get<std::uint64_t>() != e->session->revision()) {
      return send_error(res, 409, "stale revision",
                        {{"revision", e->session->revision()}});
    }
    const std::string part = body->value("part", "");
    const Json value = body->value("value", Json());
    context::ContextEdit edit;
    if (part == "summary" || part == "table_summary") {
      if (!value.is_string()) return send_error(res, 400, "value must be a string");
      edit = context::TableSummaryEdit{value.get<std::string>()};
    } else if (part == "hierarchy") {
      auto parsed = context::parse_hierarchy(value);
      if (!parsed.value) {
        return send_error(res, 422, "validation failed", {{"diagnostic", parsed.diagnostic}});
      }
      edit = context::HierarchyEdit{std::move(*parsed.value)};
    } else if (part == "column_summary") {
      const std::string column = body->value("column", "");
      if (column.empty() || !value.is_string()) {
        return send_error(res, 400, "column_summary needs \"column\" and a string value");
      }
      edit = context::ColumnSummaryEdit{column, value.get<std::string>()};
    } else {
      return send_error(res, 400, "part must be summary, hierarchy or column_summary");
    }
    try {
      const auto stale = e->session->edit_context(edit);
      Json ids = Json::array();
      for (const auto& id : stale) ids.push_back(id.str());
      send(res, 200, {{"revision", e->session->revision()}, {"stale", std::move(ids)}});
    } catch (const EditRejected& err) {
      send_error(res, 422, "validation failed", {{"diagnostic", err.diagnostic()}});
    } catch (const ConflictError& err) {
      send_error(res, 409, err.what());
    }
  });

  srv.Put(R"(/sessions/([^/]+)/verdicts/(.+))", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    auto body = parse_body(req, res);
    if (!body) return;
    const auto step = StepId::parse(req.matches[2].str());
    if (!step) return send_error(res, 404, "unknown step");
    if (!body->contains("is_error") || !(*body)["is_error"].is_boolean()) {
      return send_error(res, 400, "field \"is_error\" must be a boolean");
    }
    try {
      const auto v = e->session->override_verdict(*step, (*body)["is_error"].get<bool>(),
                                                  body->value("note", ""));
      send(res, 200,
           {{"step", step->str()},
            {"is_error", v.is_error},
            {"status", std::string(semantics::to_string(v.status))},
            {"reasoning", v.reasoning},
            {"note", v.note}});
    } catch (const UnknownStep& err) {
      send_error(res, 404, err.what());
    } catch (const AlreadyFinalized& err) {
      send_error(res, 409, err.what());
    }
  });

  srv.Post(R"(/sessions/([^/]+)/query)", [this](const httplib::Request& req,
                                                httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    auto body = parse_body(req, res);
    if (!body) return;
    const std::string q = body->value("q", "");
    try {
      const auto result = query::run_query(q, e->session->table());
      Json rows = Json::array();
      for (const auto& r : result.rows) rows.push_back(to_json(r));
      send(res, 200,
           {{"columns", result.columns}, {"row_indices", result.row_indices}, {"rows", rows}});
    } catch (const SyntaxError& err) {
      send_error(res, 400, err.what(),
                 {{"kind", "syntax"}, {"offset", err.offset()}, {"expected", err.expected()}});
    } catch (const Error& err) {
      send_error(res, 400, err.what(), {{"kind", "bind"}});
    }
  });

  srv.Get(R"(/sessions/([^/]+)/export)", [this](const httplib::Request& req,
                                                httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    try {
      res.set_content(report::export_json(*e->session), "application/json");
    } catch (const NothingToExport& err) {
      send_error(res, 409, err.what());
    }
  });

  srv.Get(R"(/sessions/([^/]+)/charts)", [this](const httplib::Request& req,
                                                httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    const auto state = e->session->snapshot();
    send(res, 200, report::charts_to_json(report::build_all_charts(*state.table, state.assignment())));
  });

  srv.Get(R"(/sessions/([^/]+)/report)", [this](const httplib::Request& req,
                                                httplib::Response& res) {
    auto e = entry(req.matches[1]);
    if (!e) return send_error(res, 404, "unknown session");
    const auto state = e->session->snapshot();
    try {
      const auto doc = report::export_document(state);
      res.set_content(report::render_static_report(
                          doc, report::build_all_charts(*state.table, state.assignment())),
                      "text/html");
    } catch (const NothingToExport& err) {
      send_error(res, 409, err.what());
    }
  });
}

}  // namespace cocoon::service
