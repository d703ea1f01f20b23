#pragma once

// Human-in-the-loop game sessions. A session hosts one game in which a
// person plays P1 (receiving robot advice, deciding call/pass) or P2
// (making claims). Every state change produces a versioned JSON message;
// transports (HTTP server, terminal) only relay requests and messages.
//
// Request:  {"round": r, "action": "call" | "pass"}                      (P1)
//           {"round": r, "action": "claim", "rank": "K", "m": 2,
//            "cheat": false, "discard": [13 counts]?}                   (P2)
// Message:  {"protocol", "type": "state" | "rejected", "session_id", "seq",
//            "role", "round", "phase", "legal_actions", "hand", "claim",
//            "advice"?, "outcome"?, "history", "trust"?, "summary"?}

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trustsim/config.h"
#include "trustsim/simulation.h"

namespace trustsim {

inline constexpr std::string_view kProtocolVersion = "trustsim-session/1";

enum class SessionRole { kP1, kP2 };

std::string_view ToString(SessionRole role);
SessionRole ParseSessionRole(std::string_view text);

struct SessionOptions {
  // Push the simulated trust trajectory to the client.
  bool expose_trust = false;
};

class Session {
 public:
  struct SubmitResult {
    bool accepted = false;
    std::string reason;  // machine-readable when rejected
    nlohmann::json message;
  };

  // `robot` may be null, in which case the robot advises at random.
  Session(std::string id, SessionRole role, const ExperimentConfig& cfg,
          std::shared_ptr<const QNetwork> robot, std::uint64_t seed,
          SessionOptions options = {});

  const std::string& id() const { return id_; }
  SessionRole role() const { return role_; }
  std::uint64_t seed() const { return seed_; }
  int round() const { return state_.round_index; }
  std::int64_t seq() const { return seq_; }
  std::string_view phase() const;
  bool finished() const { return finished_ || aborted_; }
  bool aborted() const { return aborted_; }

  nlohmann::json View() const;
  SubmitResult Submit(const nlohmann::json& request);
  void Abort(const std::string& reason);

  // Full record including hidden information; never sent mid-game.
  nlohmann::json Transcript() const;
  nlohmann::json Summary() const;

 private:
  struct Round {
    Claim claim;
    RobotObservation obs;
    RoundOutcome outcome;
    TrustState trust_before;
    TrustState trust_after;
    double trust_draw = 0.0;  // simulated P1 only
  };

  void PrepareRound();
  void Play(int a_p1, double trust_draw);
  nlohmann::json LegalActions() const;
  nlohmann::json VisibleOutcome(const Round& r) const;
  nlohmann::json Rejection(const std::string& reason, const std::string& detail) const;

  std::string id_;
  SessionRole role_;
  ExperimentConfig cfg_;
  std::shared_ptr<const QNetwork> robot_;
  std::uint64_t seed_;
  SessionOptions options_;

  GameState state_;
  Rng human_rng_;
  Rng robot_rng_;
  TrustState trust_;
  BeliefState belief_;
  std::optional<Claim> pending_claim_;
  int pending_advice_ = 0;
  std::vector<Round> rounds_;
  std::vector<nlohmann::json> accepted_requests_;
  std::int64_t seq_ = 0;
  bool finished_ = false;
  bool aborted_ = false;
  std::string abort_reason_;
};

// Re-plays a transcript's accepted requests on a fresh session with the
// same seed and returns the new transcript.
nlohmann::json ReplayTranscript(const nlohmann::json& transcript,
                                const ExperimentConfig& cfg,
                                std::shared_ptr<const QNetwork> robot);

// Thread-safe registry of isolated sessions with an event log per session
// for server push (long polling).
class SessionManager {
 public:
  SessionManager(ExperimentConfig cfg, std::shared_ptr<const QNetwork> robot,
                 SessionRole default_role, SessionOptions options = {});

  // Returns the initial state message. Seeds default to a derived stream.
  nlohmann::json Create(std::optional<SessionRole> role,
                        std::optional<std::uint64_t> seed);
  std::optional<nlohmann::json> View(const std::string& id);
  std::optional<Session::SubmitResult> Submit(const std::string& id,
                                              const nlohmann::json& request);
  bool Abort(const std::string& id, const std::string& reason);
  std::optional<nlohmann::json> Transcript(const std::string& id);

  // Messages with seq > after, waiting up to timeout_ms for one to appear.
  std::optional<std::vector<nlohmann::json>> Events(const std::string& id,
                                                    std::int64_t after,
                                                    int timeout_ms);

  // Aborts unfinished sessions with no client activity for `max_idle`
  // (a vanished client). Returns how many were aborted.
  std::size_t AbortIdle(std::chrono::milliseconds max_idle);

  std::size_t size() const;

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::mutex mu;
    std::condition_variable cv;
    Session session;
    std::vector<nlohmann::json> events;
    std::chrono::steady_clock::time_point last_active = std::chrono::steady_clock::now();
  };

  std::shared_ptr<Entry> Find(const std::string& id) const;

  ExperimentConfig cfg_;
  std::shared_ptr<const QNetwork> robot_;
  SessionRole default_role_;
  SessionOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_index_ = 0;
};

}  // namespace trustsim
