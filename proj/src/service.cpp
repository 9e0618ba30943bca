#include "wayfarer/service.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "wayfarer/error.hpp"

namespace wayfarer::service {

struct SessionManager::Session {
  std::mutex mutex;
  std::string id;
  TownLayout layout;
  Technique technique = Technique::LlmDriven;
  std::string backend_name;
  std::unique_ptr<Backend> backend;
  SimState state;
  std::vector<TraceEvent> trace;
  double created_at = 0.0;
  double origin = 0.0;  // wall-clock time matching sim time 0
};

Clock steady_clock() {
  return [] {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  };
}

SessionManager::SessionManager(TownLayout default_scene, SimConfig cfg, Clock clock)
    : default_scene_(std::move(default_scene)), cfg_(std::move(cfg)), clock_(std::move(clock)) {}

SessionManager::~SessionManager() = default;

std::string SessionManager::create(const SessionOptions& opts) {
  auto s = std::make_shared<Session>();
  s->layout = opts.scene ? *opts.scene : default_scene_;
  validate(s->layout);
  s->technique = opts.technique;
  s->backend_name = opts.backend;
  s->backend = make_backend(opts.backend);
  s->state = initial_state(s->layout, s->technique);
  check_targets(s->state, s->layout, cfg_.target_radius, &s->trace);
  s->created_at = s->origin = clock_();

  std::unique_lock lock(map_mutex_);
  s->id = fmt::format("s{}", next_id_++);
  sessions_[s->id] = s;
  return s->id;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return it->second;
}

void SessionManager::remove(const std::string& id) {
  std::unique_lock lock(map_mutex_);
  if (sessions_.erase(id) == 0) throw SessionNotFound(id);
}

void SessionManager::catch_up(Session& s) const {
  const double target = clock_() - s.origin;
  while (!s.state.done && s.state.t < cfg_.time_cap - 1e-9 && s.state.t + cfg_.dt <= target + 1e-9) {
    s.state = step(std::move(s.state), s.layout, cfg_.dt, cfg_, &s.trace);
  }
}

void SessionManager::reset(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  s->state = initial_state(s->layout, s->technique);
  s->trace.clear();
  check_targets(s->state, s->layout, cfg_.target_radius, &s->trace);
  s->origin = clock_();
}

nlohmann::json SessionManager::handle_command(const std::string& id, const CommandInput& input) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  catch_up(*s);
  const std::size_t before = s->trace.size();
  apply_command(s->state, s->layout, input, cfg_, s->backend.get(), &s->trace);
  for (std::size_t i = before; i < s->trace.size(); ++i) {
    if (s->trace[i].kind == TraceKind::Command) return s->trace[i].payload;
  }
  throw Error("command produced no trace record");
}

nlohmann::json SessionManager::get_state(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  catch_up(*s);
  const SimState& st = s->state;
  nlohmann::json j = {
      {"id", s->id},
      {"technique", to_string(s->technique)},
      {"backend", s->backend_name},
      {"t", st.t},
      {"pose", {{"position", vec_json(st.pose.position)}, {"yaw", st.pose.yaw}}},
      {"steering", {{"moving", st.steering.moving},
                    {"heading", st.steering.heading},
                    {"level", st.steering.level_index + 1},
                    {"speed", cfg_.steering.speed_levels.at(static_cast<std::size_t>(st.steering.level_index))}}},
      {"next_target_index", st.next_target_index},
      {"done", st.done},
      {"pending", nullptr},
  };
  if (st.pending) {
    j["pending"] = {{"target", vec_json(st.pending->target)},
                    {"execute_at", st.pending->execute_at},
                    {"remaining_s", std::max(0.0, st.pending->execute_at - st.t)}};
  }
  nlohmann::json visible = nlohmann::json::array();
  for (const SceneObject& o : visible_objects(s->layout, st.pose, cfg_.resolver.visibility)) {
    visible.push_back({{"id", o.id}, {"name", o.name}, {"color", o.color}, {"tag", o.tag},
                       {"position", vec_json(o.position)}});
  }
  j["visible"] = std::move(visible);
  return j;
}

nlohmann::json SessionManager::scene(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return scene_to_json(s->layout);
}

std::vector<TraceEvent> SessionManager::trace(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  catch_up(*s);
  return s->trace;
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

CommandInput parse_command_request(const nlohmann::json& body) {
  if (!body.is_object()) throw ParseError("command: expected an object");
  CommandInput in;
  try {
    if (body.contains("transcript") && !body["transcript"].is_null()) in.transcript = body["transcript"].get<std::string>();
    if (body.contains("aim") && !body["aim"].is_null()) in.aim = vec_from_json(body["aim"]);
    if (body.contains("yaw") && !body["yaw"].is_null()) in.yaw = body["yaw"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("command: ") + e.what());
  }
  return in;
}

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const SessionNotFound& e) {
      reply(res, 404, {{"error", e.what()}});
    } catch (const EmptyTranscript& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const BackendError& e) {
      reply(res, 502, {{"error", e.what()}});
    } catch (const Error& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const nlohmann::json::exception& e) {
      reply(res, 400, {{"error", e.what()}});
    }
  };
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("request body: ") + e.what());
  }
}

}  // namespace

void mount_routes(httplib::Server& server, SessionManager& m) {
  server.Post("/api/sessions", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    const nlohmann::json body = parse_body(req);
    SessionOptions opts;
    opts.technique = parse_technique(body.value("technique", std::string("llm")));
    opts.backend = body.value("backend", std::string("mock"));
    if (body.contains("scene") && !body["scene"].is_null()) opts.scene = parse_scene(body["scene"]);
    reply(res, 201, {{"id", m.create(opts)}});
  }));
  server.Get(R"(/api/sessions/([^/]+)/state)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, m.get_state(req.matches[1]));
  }));
  server.Post(R"(/api/sessions/([^/]+)/command)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, m.handle_command(req.matches[1], parse_command_request(parse_body(req))));
  }));
  server.Get(R"(/api/sessions/([^/]+)/scene)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, m.scene(req.matches[1]));
  }));
  server.Post(R"(/api/sessions/([^/]+)/reset)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    m.reset(req.matches[1]);
    reply(res, 200, m.get_state(req.matches[1]));
  }));
  server.Delete(R"(/api/sessions/([^/]+))", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    m.remove(req.matches[1]);
    res.status = 204;
  }));
}

void serve(SessionManager& manager, const std::string& host, int port) {
  httplib::Server server;
  mount_routes(server, manager);
  if (!server.listen(host, port)) throw Error(fmt::format("cannot listen on {}:{}", host, port));
}

}  // namespace wayfarer::service
