#include <httplib.h>

#include <regex>

#include "cocoon/llm.hpp"

namespace cocoon::llm {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw ConfigError("invalid endpoint URL: " + url);
  return Endpoint{m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

LiveProvider::LiveProvider(ProviderConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  split_url(config_.endpoint);
}

std::string LiveProvider::complete(const ChatRequest& request) {
  const Endpoint ep = split_url(config_.endpoint);
  httplib::Client client(ep.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  std::string user = request.user;
  if (!request.response_schema.empty()) user += "\n\nOUTPUT FORMAT\n" + request.response_schema;
  const Json body = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", Json::array({Json{{"role", "system"}, {"content", request.system}},
                                Json{{"role", "user"}, {"content", user}}})}};
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw TimeoutError("request for step " + request.step_id + " timed out: " + what);
    }
    throw TransportError("request for step " + request.step_id + " failed: " + what);
  }
  if (res->status != 200) {
    throw TransportError("provider returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 500));
  }
  try {
    const Json reply = Json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed provider reply: ") + e.what());
  }
}

}  // namespace cocoon::llm
