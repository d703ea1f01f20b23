#include "trustsim/server.h"

#include <algorithm>

#include "httplib.h"

namespace trustsim {

using nlohmann::json;

namespace {

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void NotFound(httplib::Response& res, const std::string& id) {
  Reply(res, 404, {{"protocol", kProtocolVersion},
                   {"type", "error"},
                   {"reason", "unknown_session"},
                   {"session_id", id}});
}

void BadRequest(httplib::Response& res, const std::string& detail) {
  Reply(res, 400, {{"protocol", kProtocolVersion},
                   {"type", "error"},
                   {"reason", "malformed_request"},
                   {"detail", detail}});
}

int StatusFor(const std::string& reason) {
  if (reason == "malformed_request") return 400;
  if (reason == "illegal_action") return 422;
  return 409;  // out_of_turn, session_finished
}

}  // namespace

SessionServer::SessionServer(SessionManager& manager)
    : manager_(manager), server_(std::make_unique<httplib::Server>()) {
  httplib::Server& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  srv.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, {{"protocol", kProtocolVersion}, {"status", "ok"}});
  });

  srv.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<SessionRole> role;
    std::optional<std::uint64_t> seed;
    if (!req.body.empty()) {
      const json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return BadRequest(res, "body is not a JSON object");
      try {
        if (body.contains("role")) role = ParseSessionRole(body["role"].get<std::string>());
        if (body.contains("seed")) seed = body["seed"].get<std::uint64_t>();
      } catch (const std::exception& e) {
        return BadRequest(res, e.what());
      }
    }
    Reply(res, 201, manager_.Create(role, seed));
  });

  srv.Get(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    const std::string id = req.matches[1];
    auto view = manager_.View(id);
    if (!view) return NotFound(res, id);
    Reply(res, 200, *view);
  });

  srv.Post(R"(/v1/sessions/([^/]+)/actions)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
    const std::string id = req.matches[1];
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      if (!manager_.View(id)) return NotFound(res, id);
      return BadRequest(res, "body is not valid JSON");
    }
    auto result = manager_.Submit(id, body);
    if (!result) return NotFound(res, id);
    Reply(res, result->accepted ? 200 : StatusFor(result->reason), result->message);
  });

  srv.Get(R"(/v1/sessions/([^/]+)/events)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
    const std::string id = req.matches[1];
    std::int64_t after = 0;
    int timeout_ms = 25000;
    try {
      if (req.has_param("after")) after = std::stoll(req.get_param_value("after"));
      if (req.has_param("timeout_ms"))
        timeout_ms = std::clamp(std::stoi(req.get_param_value("timeout_ms")), 0, 60000);
    } catch (const std::exception&) {
      return BadRequest(res, "after and timeout_ms must be integers");
    }
    auto events = manager_.Events(id, after, timeout_ms);
    if (!events) return NotFound(res, id);
    Reply(res, 200, {{"protocol", kProtocolVersion}, {"session_id", id}, {"events", *events}});
  });

  srv.Delete(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!manager_.Abort(id, "client_abort")) return NotFound(res, id);
    Reply(res, 200, *manager_.View(id));
  });

  srv.Get(R"(/v1/sessions/([^/]+)/transcript)", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
    const std::string id = req.matches[1];
    auto view = manager_.View(id);
    if (!view) return NotFound(res, id);
    const std::string phase = (*view)["phase"];
    if (phase != "finished" && phase != "aborted") {
      return Reply(res, 409, {{"protocol", kProtocolVersion},
                              {"type", "error"},
                              {"reason", "session_in_progress"},
                              {"session_id", id}});
    }
    Reply(res, 200, *manager_.Transcript(id));
  });
}

SessionServer::~SessionServer() { Stop(); }

void SessionServer::StartReaper() {
  if (idle_timeout_.count() <= 0 || reaper_.joinable()) return;
  reaper_stop_ = false;
  reaper_ = std::thread([this] {
    const auto period = std::clamp(idle_timeout_ / 4, std::chrono::milliseconds(10),
                                   std::chrono::milliseconds(1000));
    std::unique_lock lock(reaper_mu_);
    while (!reaper_cv_.wait_for(lock, period, [this] { return reaper_stop_; })) {
      manager_.AbortIdle(idle_timeout_);
    }
  });
}

void SessionServer::StopReaper() {
  {
    std::lock_guard lock(reaper_mu_);
    reaper_stop_ = true;
  }
  reaper_cv_.notify_all();
  if (reaper_.joinable()) reaper_.join();
}

bool SessionServer::Listen(const std::string& host, int port) {
  StartReaper();
  const bool ok = server_->listen(host, port);
  StopReaper();
  return ok;
}

int SessionServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) return -1;
  StartReaper();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void SessionServer::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  StopReaper();
}

}  // namespace trustsim
