#include "wayfarer/backend.hpp"

#include <cmath>
#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "wayfarer/error.hpp"
#include "wayfarer/intent.hpp"

namespace wayfarer {
namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw BackendError("backend URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

BackendResponse MockBackend::complete(const BackendRequest& request) {
  return {mock_resolve(request.transcript, request.pose, request.visible), latency_s_};
}

BackendResponse ScriptedBackend::complete(const BackendRequest&) {
  if (replies_.empty()) return {"", latency_s_};
  const std::string& reply = replies_[std::min(next_, replies_.size() - 1)];
  ++next_;
  return {reply, latency_s_};
}

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig cfg;
  cfg.url = env_or("WAYFARER_LLM_URL", "");
  cfg.key = env_or("WAYFARER_LLM_KEY", "");
  cfg.model = env_or("WAYFARER_LLM_MODEL", cfg.model);
  return cfg;
}

BackendResponse RemoteBackend::complete(const BackendRequest& request) {
  if (cfg_.url.empty()) throw BackendError("WAYFARER_LLM_URL is not set");
  const SplitUrl target = split_url(cfg_.url);

  httplib::Client client(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!cfg_.key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.key);

  const nlohmann::json body = {
      {"model", cfg_.model},
      {"messages",
       {{{"role", "system"}, {"content", request.prompts.system}},
        {{"role", "user"}, {"content", request.prompts.user}}}},
  };

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(target.path, headers, body.dump(), "application/json");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!result) throw BackendError("backend request failed: " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300) {
    throw BackendError("backend returned HTTP " + std::to_string(result->status));
  }
  try {
    const auto doc = nlohmann::json::parse(result->body);
    return {doc.at("choices").at(0).at("message").at("content").get<std::string>(), elapsed};
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed backend response: ") + e.what());
  }
}

BackendResponse query_backend(const BackendRequest& request, Backend& backend) {
  BackendResponse response;
  try {
    response = backend.complete(request);
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(backend.name() + " backend failed: " + e.what());
  }
  if (!std::isfinite(response.latency_s) || response.latency_s < 0.0) {
    throw BackendError(backend.name() + " backend reported an invalid latency");
  }
  return response;
}

std::unique_ptr<Backend> make_backend(std::string_view selector, double mock_latency_s) {
  if (selector == "mock") return std::make_unique<MockBackend>(mock_latency_s);
  if (selector == "remote") return std::make_unique<RemoteBackend>(RemoteConfig::from_env());
  throw ValidationError("backend: expected 'mock' or 'remote', got '" + std::string(selector) + "'");
}

}  // namespace wayfarer
