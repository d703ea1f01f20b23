#pragma once

// HTTP/JSON transport for sessions.
//
//   POST   /v1/sessions                      {"role"?, "seed"?} -> state
//   GET    /v1/sessions/{id}                 -> state
//   POST   /v1/sessions/{id}/actions         request -> state | rejected
//   GET    /v1/sessions/{id}/events?after=N&timeout_ms=T  -> {"events": [...]}
//   DELETE /v1/sessions/{id}                 abort -> state
//   GET    /v1/sessions/{id}/transcript      (finished sessions only)
//   GET    /v1/health

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "trustsim/session.h"

namespace httplib {
class Server;
}

namespace trustsim {

class SessionServer {
 public:
  explicit SessionServer(SessionManager& manager);
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  // Blocks until Stop(). Returns false if the socket could not be bound.
  bool Listen(const std::string& host, int port);

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port, or -1 on failure.
  int Start(const std::string& host, int port);
  void Stop();

  // Sessions idle longer than this are aborted while serving; zero
  // disables the reaper. Set before Listen/Start.
  void SetIdleTimeout(std::chrono::milliseconds timeout) { idle_timeout_ = timeout; }

 private:
  void StartReaper();
  void StopReaper();

  SessionManager& manager_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::chrono::milliseconds idle_timeout_{0};
  std::thread reaper_;
  std::mutex reaper_mu_;
  std::condition_variable reaper_cv_;
  bool reaper_stop_ = false;
};

}  // namespace trustsim
