#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cocoon/errors.hpp"
#include "cocoon/json.hpp"

namespace cocoon::llm {

inline constexpr const char* kApiKeyEnv = "COCOON_LLM_API_KEY";

struct ChatRequest {
  std::string step_id;
  std::string system;
  std::string user;
  // Human-readable description of the expected output, appended to prompts.
  std::string response_schema;
};

enum class ProviderKind { Live, Mock, Replay };
std::string_view to_string(ProviderKind kind);
std::optional<ProviderKind> provider_kind_from_string(std::string_view name);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::Mock;
  std::string model = "gpt-4o";
  // OpenAI-compatible chat-completions URL.
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  double temperature = 0.0;
  std::size_t max_in_flight = 4;
  std::filesystem::path script_path;      // mock
  std::filesystem::path transcript_path;  // replay source, or live recording target
};

// step_id -> canned raw responses, consumed one per attempt.
struct MockScript {
  std::map<std::string, std::vector<std::string>> responses;

  static MockScript from_json(const Json& doc);
  static MockScript load(const std::filesystem::path& path);
};

class Provider {
 public:
  virtual ~Provider() = default;
  // Returns provider text verbatim.
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual ProviderKind kind() const noexcept = 0;
};

// Serves a MockScript. Thread-safe; each step consumes its own entries.
class MockProvider : public Provider {
 public:
  explicit MockProvider(MockScript script, ProviderKind reported = ProviderKind::Mock);

  std::string complete(const ChatRequest& request) override;
  ProviderKind kind() const noexcept override { return reported_; }

  // Counters since construction or the last reset_counters. Resetting keeps
  // each step's position in the script.
  std::size_t calls(const std::string& step_id) const;
  std::size_t total_calls() const;
  // Prompts seen by a step, in call order.
  std::vector<std::string> prompts(const std::string& step_id) const;
  void reset_counters();

 private:
  mutable std::mutex mu_;
  MockScript script_;
  ProviderKind reported_;
  std::map<std::string, std::size_t> consumed_;
  std::map<std::string, std::size_t> calls_;
  std::map<std::string, std::vector<std::string>> prompts_;
  std::size_t total_ = 0;
};

struct TranscriptRecord {
  std::string step_id;
  std::string system;
  std::string user;
  std::string response;
};

// Ordered record of exchanges; the JSON shape is
//   {"records": [{"step_id", "request": {"system", "user"}, "response"}]}
class Transcript {
 public:
  Transcript() = default;
  Transcript(const Transcript& other) : records_(other.records()) {}
  Transcript& operator=(const Transcript& other) {
    if (this != &other) {
      auto copy = other.records();
      std::lock_guard lock(mu_);
      records_ = std::move(copy);
    }
    return *this;
  }

  void append(TranscriptRecord record);
  std::vector<TranscriptRecord> records() const;
  Json to_json() const;
  void save(const std::filesystem::path& path) const;
  static Transcript load(const std::filesystem::path& path);
  static Transcript from_json(const Json& doc);
  // Replay script: responses grouped by step in recorded order.
  MockScript as_script() const;

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptRecord> records_;
};

// Wraps another provider and appends every exchange to a transcript.
class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<Transcript> transcript);
  std::string complete(const ChatRequest& request) override;
  ProviderKind kind() const noexcept override { return inner_->kind(); }

 private:
  std::shared_ptr<Provider> inner_;
  std::shared_ptr<Transcript> transcript_;
};

// OpenAI-compatible HTTP chat completion.
class LiveProvider : public Provider {
 public:
  LiveProvider(ProviderConfig config, std::string api_key);
  std::string complete(const ChatRequest& request) override;
  ProviderKind kind() const noexcept override { return ProviderKind::Live; }

 private:
  ProviderConfig config_;
  std::string api_key_;
};

// Builds the provider named by `config`. Live requires the API key in the
// environment and raises ConfigError before any network activity otherwise.
std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

// Parses the last fenced code block as JSON, falling back to the whole text.
// Throws NoStructuredContent with a diagnostic suitable for a retry prompt.
Json extract_fenced_json(std::string_view raw);

template <class T>
struct Checked {
  std::optional<T> value;
  std::string diagnostic;

  static Checked ok(T v) { return Checked{std::move(v), {}}; }
  static Checked fail(std::string why) { return Checked{std::nullopt, std::move(why)}; }
};

template <class T>
using Validator = std::function<Checked<T>(const std::string& raw)>;

template <class T>
struct ChatResponse {
  std::string raw;
  T parsed;
  int attempts = 0;
  std::vector<std::string> diagnostics;  // from rejected attempts
};

// Provider plus the client-side policy: in-flight cap and retry budget.
class LlmClient {
 public:
  LlmClient(std::shared_ptr<Provider> provider, ProviderConfig config);

  std::string complete(const ChatRequest& request);

  // Calls complete + validate up to max_retries + 1 times. Each retry appends
  // the previous diagnostic to the user prompt. Transport errors propagate.
  template <class T>
  ChatResponse<T> complete_validated(const ChatRequest& request, const Validator<T>& validate) {
    std::vector<std::string> diagnostics;
    ChatRequest attempt = request;
    const int budget = config_.max_retries + 1;
    for (int i = 1; i <= budget; ++i) {
      std::string raw = complete(attempt);
      Checked<T> checked = validate(raw);
      if (checked.value) {
        return ChatResponse<T>{std::move(raw), std::move(*checked.value), i,
                               std::move(diagnostics)};
      }
      diagnostics.push_back(checked.diagnostic);
      attempt.user = with_feedback(request.user, checked.diagnostic);
    }
    throw ValidationExhausted(request.step_id, std::move(diagnostics));
  }

  const ProviderConfig& config() const noexcept { return config_; }
  Provider& provider() noexcept { return *provider_; }
  std::shared_ptr<Provider> provider_ptr() const { return provider_; }

  static std::string with_feedback(const std::string& user, const std::string& diagnostic);

 private:
  std::shared_ptr<Provider> provider_;
  ProviderConfig config_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace cocoon::llm
