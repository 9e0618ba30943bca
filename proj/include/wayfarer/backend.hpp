#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wayfarer/world.hpp"

namespace wayfarer {

struct PromptPair {
  std::string system;
  std::string user;
};

// What a backend is asked. Remote models see only `prompts`; the structured
// fields let the deterministic mock answer without re-parsing prompt text.
struct BackendRequest {
  PromptPair prompts;
  std::string transcript;
  Pose pose;
  std::vector<SceneObject> visible;
};

struct BackendResponse {
  std::string text;
  double latency_s = 0.0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse complete(const BackendRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Rule-based stand-in for a language model. Reports a fixed latency instead of
// sleeping so that sessions replay identically.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(double latency_s = 0.97) : latency_s_(latency_s) {}
  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override { return "mock"; }

 private:
  double latency_s_;
};

// Returns canned replies in order (the last one repeats). Used to replay
// adversarial or recorded model output.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies, double latency_s = 0.0)
      : replies_(std::move(replies)), latency_s_(latency_s) {}
  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  double latency_s_;
};

struct RemoteConfig {
  std::string url;    // full chat-completions URL
  std::string key;    // bearer token, may be empty
  std::string model = "gpt-4o";
  std::chrono::milliseconds timeout{10'000};

  // Reads WAYFARER_LLM_URL, WAYFARER_LLM_KEY and optionally WAYFARER_LLM_MODEL.
  static RemoteConfig from_env();
};

// Chat-completion client: posts the system and user roles, consumes only the
// first choice's message content.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {}
  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override { return "remote"; }

 private:
  RemoteConfig cfg_;
};

// Queries `backend`, converting any transport-level failure into BackendError.
// Refusal text is a normal response.
BackendResponse query_backend(const BackendRequest& request, Backend& backend);

// "mock" or "remote".
std::unique_ptr<Backend> make_backend(std::string_view selector, double mock_latency_s = 0.97);

}  // namespace wayfarer
