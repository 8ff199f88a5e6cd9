#include "cocoon/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cocoon::llm {

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::Live: return "live";
    case ProviderKind::Mock: return "mock";
    case ProviderKind::Replay: return "replay";
  }
  return "mock";
}

std::optional<ProviderKind> provider_kind_from_string(std::string_view name) {
  if (name == "live") return ProviderKind::Live;
  if (name == "mock") return ProviderKind::Mock;
  if (name == "replay") return ProviderKind::Replay;
  return std::nullopt;
}

namespace {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

MockScript MockScript::from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("mock script must be an object of step_id -> [responses]");
  MockScript script;
  for (const auto& [step, entries] : doc.items()) {
    auto& list = script.responses[step];
    if (entries.is_string()) {
      list.push_back(entries.get<std::string>());
      continue;
    }
    if (!entries.is_array()) throw ConfigError("mock script entry " + step + " must be a list");
    for (const auto& e : entries) {
      // Non-string entries are canned structured outputs; serve them as JSON text.
      list.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    }
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

MockProvider::MockProvider(MockScript script, ProviderKind reported)
    : script_(std::move(script)), reported_(reported) {}

std::string MockProvider::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  ++total_;
  ++calls_[request.step_id];
  prompts_[request.step_id].push_back(request.user);
  const auto it = script_.responses.find(request.step_id);
  std::size_t& used = consumed_[request.step_id];
  if (it == script_.responses.end() || used >= it->second.size()) {
    const std::size_t have = it == script_.responses.end() ? 0 : it->second.size();
    ++used;
    throw ScriptExhausted("script exhausted for step " + request.step_id + " (request " +
                          std::to_string(used) + ", " + std::to_string(have) + " scripted)");
  }
  return it->second[used++];
}

std::size_t MockProvider::calls(const std::string& step_id) const {
  std::lock_guard lock(mu_);
  const auto it = calls_.find(step_id);
  return it == calls_.end() ? 0 : it->second;
}

std::size_t MockProvider::total_calls() const {
  std::lock_guard lock(mu_);
  return total_;
}

std::vector<std::string> MockProvider::prompts(const std::string& step_id) const {
  std::lock_guard lock(mu_);
  const auto it = prompts_.find(step_id);
  return it == prompts_.end() ? std::vector<std::string>{} : it->second;
}

void MockProvider::reset_counters() {
  std::lock_guard lock(mu_);
  total_ = 0;
  calls_.clear();
  prompts_.clear();
}

void Transcript::append(TranscriptRecord record) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(record));
}

std::vector<TranscriptRecord> Transcript::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

Json Transcript::to_json() const {
  Json recs = Json::array();
  for (const auto& r : records()) {
    recs.push_back(Json{{"step_id", r.step_id},
                        {"request", Json{{"system", r.system}, {"user", r.user}}},
                        {"response", r.response}});
  }
  return Json{{"records", std::move(recs)}};
}

void Transcript::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

Transcript Transcript::from_json(const Json& doc) {
  Transcript t;
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
    throw ConfigError("transcript must be an object with a records array");
  }
  for (const auto& r : doc["records"]) {
    TranscriptRecord rec;
    rec.step_id = r.at("step_id").get<std::string>();
    rec.response = r.at("response").get<std::string>();
    if (r.contains("request")) {
      rec.system = r["request"].value("system", "");
      rec.user = r["request"].value("user", "");
    }
    t.records_.push_back(std::move(rec));
  }
  return t;
}

Transcript Transcript::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

MockScript Transcript::as_script() const {
  MockScript script;
  for (const auto& r : records()) script.responses[r.step_id].push_back(r.response);
  return script;
}

RecordingProvider::RecordingProvider(std::shared_ptr<Provider> inner,
                                     std::shared_ptr<Transcript> transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {}

std::string RecordingProvider::complete(const ChatRequest& request) {
  std::string response = inner_->complete(request);
  transcript_->append({request.step_id, request.system, request.user, response});
  return response;
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
  switch (config.kind) {
    case ProviderKind::Live: {
      const char* key = std::getenv(kApiKeyEnv);
      if (key == nullptr || *key == '\0') {
        throw ConfigError(std::string("live provider requires ") + kApiKeyEnv);
      }
      return std::make_shared<LiveProvider>(config, key);
    }
    case ProviderKind::Mock:
      if (config.script_path.empty()) throw ConfigError("mock provider requires a script path");
      return std::make_shared<MockProvider>(MockScript::load(config.script_path));
    case ProviderKind::Replay:
      if (config.transcript_path.empty()) {
        throw ConfigError("replay provider requires a transcript path");
      }
      return std::make_shared<MockProvider>(Transcript::load(config.transcript_path).as_script(),
                                            ProviderKind::Replay);
  }
  throw ConfigError("unknown provider kind");
}

Json extract_fenced_json(std::string_view raw) {
  std::string last_error;
  auto try_parse = [&](std::string_view text) -> std::optional<Json> {
    try {
      Json j = Json::parse(text);
      if (j.is_object() || j.is_array()) return j;
      last_error = "content is a bare JSON scalar, expected an object";
    } catch (const Json::parse_error& e) {
      last_error = e.what();
    }
    return std::nullopt;
  };

  // Locate the last complete ``` ... ``` block.
  std::optional<std::string_view> block;
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find("```", pos);
    if (open == std::string_view::npos) break;
    auto body = raw.find('\n', open + 3);
    if (body == std::string_view::npos) break;
    const auto close = raw.find("```", body + 1);
    if (close == std::string_view::npos) break;
    block = raw.substr(body + 1, close - body - 1);
    pos = close + 3;
  }
  if (block) {
    if (auto j = try_parse(*block)) return *j;
    const std::string fenced_error = last_error;
    if (auto j = try_parse(raw)) return *j;
    throw NoStructuredContent("the last fenced code block is not valid JSON (" + fenced_error +
                              ")");
  }
  if (auto j = try_parse(raw)) return *j;
  throw NoStructuredContent(
      "no JSON object found; answer with a single fenced ```json code block (" + last_error + ")");
}

LlmClient::LlmClient(std::shared_ptr<Provider> provider, ProviderConfig config)
    : provider_(std::move(provider)),
      config_(std::move(config)),
      in_flight_(std::make_unique<std::counting_semaphore<1024>>(
          static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 1024)))) {}

std::string LlmClient::complete(const ChatRequest& request) {
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<1024>* s;
    ~Release() { s->release(); }
  } release{in_flight_.get()};
  return provider_->complete(request);
}

std::string LlmClient::with_feedback(const std::string& user, const std::string& diagnostic) {
  return user + "\n\nYour previous answer was rejected: " + diagnostic +
         "\nPlease answer again, fixing exactly this problem.";
}

}  // namespace cocoon::llm
