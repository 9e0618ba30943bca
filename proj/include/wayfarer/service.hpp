#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "wayfarer/locomotion.hpp"

namespace httplib {
class Server;
}

namespace wayfarer::service {

// Seconds on a monotonic clock. Tests inject a manual one.
using Clock = std::function<double()>;
Clock steady_clock();

struct SessionOptions {
  Technique technique = Technique::LlmDriven;
  std::string backend = "mock";
  std::optional<TownLayout> scene;  // default scene when absent
};

// Live sessions whose simulations advance at wall-clock rate. Time is caught
// up lazily, in whole ticks, whenever a request touches the session.
class SessionManager {
 public:
  SessionManager(TownLayout default_scene, SimConfig cfg = {}, Clock clock = steady_clock());
  ~SessionManager();

  std::string create(const SessionOptions& opts);
  void remove(const std::string& id);
  void reset(const std::string& id);

  // The response equals the payload of the command trace event it records.
  nlohmann::json handle_command(const std::string& id, const CommandInput& input);
  nlohmann::json get_state(const std::string& id);
  nlohmann::json scene(const std::string& id);
  std::vector<TraceEvent> trace(const std::string& id);

  std::size_t size() const;
  const SimConfig& config() const { return cfg_; }

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  void catch_up(Session& s) const;

  TownLayout default_scene_;
  SimConfig cfg_;
  Clock clock_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

CommandInput parse_command_request(const nlohmann::json& body);

// Registers the /api routes on `server`.
void mount_routes(httplib::Server& server, SessionManager& manager);

// Blocks serving on host:port until the process ends.
void serve(SessionManager& manager, const std::string& host, int port);

}  // namespace wayfarer::service
