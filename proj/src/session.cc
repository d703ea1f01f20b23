#include "trustsim/session.h"

#include <chrono>
#include <stdexcept>

namespace trustsim {

using nlohmann::json;

std::string_view ToString(SessionRole role) {
  return role == SessionRole::kP1 ? "p1" : "p2";
}

SessionRole ParseSessionRole(std::string_view text) {
  if (text == "p1" || text == "P1") return SessionRole::kP1;
  if (text == "p2" || text == "P2") return SessionRole::kP2;
  throw std::invalid_argument("unknown session role: " + std::string(text));
}

namespace {

json HandJson(const Hand& h) {
  json cards = json::array();
  for (int r = 0; r < kNumRanks; ++r)
    for (int k = 0; k < h.Count(Rank(r)); ++k) cards.push_back(RankName(Rank(r)));
  return {{"counts", h.counts()}, {"cards", cards}, {"size", h.Size()}};
}

json TrustJson(const TrustState& t) {
  return {{"alpha", t.alpha}, {"beta", t.beta}, {"mean", TrustMean(t)}};
}

const char* P1Name(int a) { return a == 1 ? "call" : "pass"; }

// Lowest-ranked cards that are not of the claimed rank.
Hand DefaultCheatCards(const Hand& hand, Rank claimed, int m) {
  Hand out;
  for (int r = 0; r < kNumRanks && m > 0; ++r) {
    if (r == claimed.index) continue;
    const int take = std::min(m, hand.Count(Rank(r)));
    if (take > 0) out.Add(Rank(r), take);
    m -= take;
  }
  return out;
}

struct ParsedClaim {
  std::optional<Claim> claim;
  std::string error;
};

ParsedClaim ParseClaimRequest(const json& req, const Hand& hand) {
  ParsedClaim out;
  std::optional<Rank> rank;
  if (!req.contains("rank")) {
    out.error = "missing rank";
    return out;
  }
  const json& jr = req["rank"];
  if (jr.is_string()) {
    rank = ParseRank(jr.get<std::string>());
  } else if (jr.is_number_integer()) {
    const int i = jr.get<int>();
    if (i >= 0 && i < kNumRanks) rank = Rank(i);
  }
  if (!rank) {
    out.error = "unknown rank";
    return out;
  }
  if (!req.contains("m") || !req["m"].is_number_integer()) {
    out.error = "missing or non-integer m";
    return out;
  }
  Claim c;
  c.rank = *rank;
  c.m = req["m"].get<int>();
  if (req.contains("cheat")) {
    const json& jc = req["cheat"];
    if (jc.is_boolean()) {
      c.cheat = jc.get<bool>() ? 1 : 0;
    } else if (jc.is_number_integer()) {
      c.cheat = jc.get<int>();
    } else {
      out.error = "cheat must be a boolean";
      return out;
    }
  }
  if (req.contains("discard")) {
    const json& jd = req["discard"];
    if (!jd.is_array()) {
      out.error = "discard must be an array";
      return out;
    }
    std::array<int, kNumRanks> counts{};
    if (jd.size() == kNumRanks && std::all_of(jd.begin(), jd.end(), [](const json& v) {
          return v.is_number_integer();
        })) {
      for (int r = 0; r < kNumRanks; ++r) counts[r] = jd[r].get<int>();
    } else {
      for (const json& v : jd) {
        std::optional<Rank> dr;
        if (v.is_string()) dr = ParseRank(v.get<std::string>());
        if (!dr) {
          out.error = "discard entries must be rank names";
          return out;
        }
        counts[dr->index] += 1;
      }
    }
    for (int x : counts) {
      if (x < 0 || x > kCopiesPerRank) {
        out.error = "discard count out of range";
        return out;
      }
    }
    c.actual = Hand(counts);
  } else if (c.m >= 1 && c.m <= kMaxClaim) {
    if (c.cheat == 1) {
      c.actual = DefaultCheatCards(hand, c.rank, c.m);
    } else if (c.cheat == 0) {
      c.actual.Add(c.rank, std::min(c.m, kCopiesPerRank));
    }
  }
  out.claim = c;
  return out;
}

}  // namespace

Session::Session(std::string id, SessionRole role, const ExperimentConfig& cfg,
                 std::shared_ptr<const QNetwork> robot, std::uint64_t seed,
                 SessionOptions options)
    : id_(std::move(id)),
      role_(role),
      cfg_(cfg),
      robot_(std::move(robot)),
      seed_(seed),
      options_(options),
      human_rng_(SplitGameSeed(seed).human),
      robot_rng_(SplitGameSeed(seed).robot),
      trust_(cfg.initial_trust),
      belief_(cfg.initial_belief) {
  cfg_.Validate();
  if (role_ == SessionRole::kP2) {
    cfg_.game.opponent_mode = OpponentMode::kExternal;
  } else if (cfg_.game.opponent_mode == OpponentMode::kExternal) {
    cfg_.game.opponent_mode = OpponentMode::kRandom;
  }
  if (robot_ && robot_->input_width() != cfg_.feature_width()) {
    throw std::invalid_argument("robot network input width does not match config");
  }
  state_ = NewGame(cfg_.game, SplitGameSeed(seed).deal);
  PrepareRound();
  seq_ = 1;
}

std::string_view Session::phase() const {
  if (aborted_) return "aborted";
  if (finished_) return "finished";
  return role_ == SessionRole::kP1 ? "p1_decide" : "p2_claim";
}

void Session::PrepareRound() {
  pending_claim_.reset();
  if (IsTerminal(state_)) {
    finished_ = true;
    return;
  }
  if (role_ != SessionRole::kP1) return;
  const Claim claim = OpponentClaim(state_);
  RobotObservation obs{claim.m, CountClaimedRank(state_.hand_p1, claim.rank),
                       belief_.b0, belief_.b1, claim.cheat};
  pending_advice_ = robot_ ? GreedyPolicy(*robot_, obs) : RandomPolicy(robot_rng_);
  pending_claim_ = claim;
}

void Session::Play(int a_p1, double trust_draw) {
  Round r;
  r.claim = *pending_claim_;
  r.obs = {r.claim.m, CountClaimedRank(state_.hand_p1, r.claim.rank), belief_.b0,
           belief_.b1, r.claim.cheat};
  r.trust_before = trust_;
  r.trust_draw = trust_draw;
  r.outcome = ResolveRound(state_, r.claim, a_p1, pending_advice_);
  trust_ = UpdateTrust(trust_, r.outcome.a_p2, r.outcome.a_r, a_p1, cfg_.gains);
  belief_ = UpdateBelief(belief_, r.outcome);
  r.trust_after = trust_;
  rounds_.push_back(r);
  ++seq_;
  PrepareRound();
}

json Session::LegalActions() const {
  json out = json::array();
  if (finished()) return out;
  if (role_ == SessionRole::kP1) {
    out.push_back({{"action", "call"}});
    out.push_back({{"action", "pass"}});
    return out;
  }
  const Hand& h = state_.hand_p2;
  const int max_m = std::min(kMaxClaim, h.Size());
  for (int r = 0; r < kNumRanks; ++r) {
    const int held = h.Count(Rank(r));
    for (int m = 1; m <= max_m; ++m) {
      if (held >= m)
        out.push_back({{"action", "claim"}, {"rank", RankName(Rank(r))}, {"m", m},
                       {"cheat", false}});
      if (h.Size() - held >= m)
        out.push_back({{"action", "claim"}, {"rank", RankName(Rank(r))}, {"m", m},
                       {"cheat", true}});
    }
  }
  return out;
}

json Session::VisibleOutcome(const Round& r) const {
  const RoundOutcome& o = r.outcome;
  json j = {{"rank", RankName(r.claim.rank)},
            {"m", o.m},
            {"a_p1", P1Name(o.a_p1)},
            {"result", o.a_p1 == 0   ? "pass"
                       : o.a_p2 == 1 ? "correct_challenge"
                                     : "wrong_challenge"},
            {"revealed", o.revealed},
            {"dc_p1", o.dc_p1},
            {"dc_p2", o.dc_p2}};
  if (role_ == SessionRole::kP1) {
    j["advice"] = P1Name(o.a_r);
  }
  if (role_ == SessionRole::kP2 || o.revealed) {
    j["a_p2"] = o.a_p2 == 1 ? "cheat" : "honest";
    j["actual"] = HandJson(r.claim.actual);
  }
  return j;
}

json Session::View() const {
  json j;
  j["protocol"] = kProtocolVersion;
  j["type"] = "state";
  j["session_id"] = id_;
  j["seq"] = seq_;
  j["role"] = ToString(role_);
  j["round"] = state_.round_index;
  j["max_rounds"] = cfg_.game.max_rounds;
  j["phase"] = phase();
  j["legal_actions"] = LegalActions();
  const Hand& own = role_ == SessionRole::kP1 ? state_.hand_p1 : state_.hand_p2;
  const Hand& other = role_ == SessionRole::kP1 ? state_.hand_p2 : state_.hand_p1;
  j["hand"] = HandJson(own);
  j["opponent_cards"] = other.Size();
  if (pending_claim_) {
    j["claim"] = {{"rank", RankName(pending_claim_->rank)}, {"m", pending_claim_->m}};
    j["advice"] = P1Name(pending_advice_);
  } else {
    j["claim"] = nullptr;
  }
  if (!rounds_.empty()) j["outcome"] = VisibleOutcome(rounds_.back());
  json history = json::array();
  for (const Round& r : rounds_) history.push_back(VisibleOutcome(r));
  j["history"] = history;
  if (options_.expose_trust) {
    json traj = json::array();
    traj.push_back(TrustMean(cfg_.initial_trust));
    for (const Round& r : rounds_) traj.push_back(TrustMean(r.trust_after));
    j["trust"] = traj;
  }
  if (finished()) j["summary"] = Summary();
  return j;
}

json Session::Rejection(const std::string& reason, const std::string& detail) const {
  json j = View();
  j["type"] = "rejected";
  j["reason"] = reason;
  j["detail"] = detail;
  return j;
}

Session::SubmitResult Session::Submit(const json& request) {
  SubmitResult res;
  auto reject = [&](const std::string& reason, const std::string& detail) {
    res.accepted = false;
    res.reason = reason;
    res.message = Rejection(reason, detail);
    return res;
  };
  if (!request.is_object() || !request.contains("action") ||
      !request["action"].is_string()) {
    return reject("malformed_request", "expected an object with a string action");
  }
  if (finished()) return reject("session_finished", std::string(phase()));
  if (!request.contains("round") || !request["round"].is_number_integer()) {
    return reject("malformed_request", "missing integer round");
  }
  if (request["round"].get<int>() != state_.round_index) {
    return reject("out_of_turn", "round " + std::to_string(state_.round_index) +
                                     " is in progress");
  }
  const std::string action = request["action"].get<std::string>();
  const bool p1_action = action == "call" || action == "pass";
  if (!p1_action && action != "claim") return reject("illegal_action", "unknown action " + action);
  if (p1_action != (role_ == SessionRole::kP1)) {
    return reject("out_of_turn", "it is not " + action + "'s turn");
  }

  if (p1_action) {
    Play(action == "call" ? 1 : 0, 0.0);
  } else {
    ParsedClaim pc = ParseClaimRequest(request, state_.hand_p2);
    if (!pc.claim) return reject("illegal_action", pc.error);
    if (auto why = ValidateClaim(state_.hand_p2, *pc.claim)) {
      return reject("illegal_action", *why);
    }
    const Claim& c = *pc.claim;
    RobotObservation obs{c.m, CountClaimedRank(state_.hand_p1, c.rank), belief_.b0,
                         belief_.b1, c.cheat};
    pending_advice_ = robot_ ? GreedyPolicy(*robot_, obs) : RandomPolicy(robot_rng_);
    pending_claim_ = c;
    const double draw = SampleTrust(trust_, human_rng_);
    const double p_risk = RiskCoefficient(obs.m, obs.n, cfg_.risk);
    const int a_p1 =
        SampleP1Action(P1ActionProbs(draw, p_risk, pending_advice_), human_rng_);
    Play(a_p1, draw);
  }
  accepted_requests_.push_back(request);
  res.accepted = true;
  res.message = View();
  return res;
}

void Session::Abort(const std::string& reason) {
  if (finished()) return;
  aborted_ = true;
  abort_reason_ = reason;
  pending_claim_.reset();
  ++seq_;
}

json Session::Summary() const {
  int correct = 0, followed = 0, advice_correct = 0;
  for (const Round& r : rounds_) {
    correct += r.outcome.a_p1 == r.outcome.a_p2;
    followed += r.outcome.a_p1 == r.outcome.a_r;
    advice_correct += r.outcome.a_r == r.outcome.a_p2;
  }
  json j = {{"status", aborted_ ? "aborted" : (finished_ ? "finished" : "in_progress")},
            {"rounds", rounds_.size()},
            {"cards_p1", state_.hand_p1.Size()},
            {"cards_p2", state_.hand_p2.Size()},
            {"p1_correct", correct},
            {"advice_followed", followed},
            {"advice_correct", advice_correct},
            {"final_trust", TrustJson(trust_)}};
  if (aborted_) j["abort_reason"] = abort_reason_;
  return j;
}

json Session::Transcript() const {
  json rounds = json::array();
  for (std::size_t i = 0; i < rounds_.size(); ++i) {
    const Round& r = rounds_[i];
    const RoundOutcome& o = r.outcome;
    rounds.push_back(
        {{"round", i},
         {"claim",
          {{"rank", RankName(r.claim.rank)},
           {"m", r.claim.m},
           {"cheat", r.claim.cheat},
           {"actual", r.claim.actual.counts()}}},
         {"observation",
          {{"m", r.obs.m}, {"n", r.obs.n}, {"b0", r.obs.b0}, {"b1", r.obs.b1},
           {"p2_action", r.obs.p2_action}}},
         {"outcome",
          {{"a_p2", o.a_p2}, {"a_r", o.a_r}, {"a_p1", o.a_p1}, {"dc_p1", o.dc_p1},
           {"dc_p2", o.dc_p2}, {"revealed", o.revealed}, {"m", o.m}, {"n", o.n}}},
         {"trust_before", TrustJson(r.trust_before)},
         {"trust_after", TrustJson(r.trust_after)},
         {"trust_draw", r.trust_draw}});
  }
  return {{"protocol", kProtocolVersion},
          {"session_id", id_},
          {"role", ToString(role_)},
          {"seed", seed_},
          {"config", ConfigToJson(cfg_)},
          {"robot", robot_ ? "checkpoint" : "random"},
          {"requests", accepted_requests_},
          {"rounds", rounds},
          {"aborted", aborted_},
          {"summary", Summary()}};
}

json ReplayTranscript(const json& transcript, const ExperimentConfig& cfg,
                      std::shared_ptr<const QNetwork> robot) {
  Session s(transcript.at("session_id").get<std::string>(),
            ParseSessionRole(transcript.at("role").get<std::string>()), cfg,
            std::move(robot), transcript.at("seed").get<std::uint64_t>());
  for (const json& req : transcript.at("requests")) {
    const auto res = s.Submit(req);
    if (!res.accepted) {
      throw std::runtime_error("replay diverged: request rejected with " + res.reason);
    }
  }
  if (transcript.value("aborted", false)) {
    s.Abort(transcript.at("summary").value("abort_reason", "aborted"));
  }
  return s.Transcript();
}

SessionManager::SessionManager(ExperimentConfig cfg,
                               std::shared_ptr<const QNetwork> robot,
                               SessionRole default_role, SessionOptions options)
    : cfg_(std::move(cfg)),
      robot_(std::move(robot)),
      default_role_(default_role),
      options_(options) {
  cfg_.Validate();
}

std::shared_ptr<SessionManager::Entry> SessionManager::Find(const std::string& id) const {
  std::shared_ptr<Entry> e;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    e = it->second;
  }
  std::lock_guard lock(e->mu);
  e->last_active = std::chrono::steady_clock::now();
  return e;
}

json SessionManager::Create(std::optional<SessionRole> role,
                            std::optional<std::uint64_t> seed) {
  std::lock_guard lock(mu_);
  const std::uint64_t index = next_index_++;
  const std::uint64_t s = seed ? *seed : DeriveSeed(cfg_.master_seed, kSessionStream, index);
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06llu-%08llx", static_cast<unsigned long long>(index),
                static_cast<unsigned long long>(Mix64(s) & 0xffffffffULL));
  auto entry = std::make_shared<Entry>(
      Session(buf, role.value_or(default_role_), cfg_, robot_, s, options_));
  json first = entry->session.View();
  entry->events.push_back(first);
  sessions_.emplace(buf, entry);
  return first;
}

std::optional<json> SessionManager::View(const std::string& id) {
  auto e = Find(id);
  if (!e) return std::nullopt;
  std::lock_guard lock(e->mu);
  return e->session.View();
}

std::optional<Session::SubmitResult> SessionManager::Submit(const std::string& id,
                                                            const json& request) {
  auto e = Find(id);
  if (!e) return std::nullopt;
  std::lock_guard lock(e->mu);
  Session::SubmitResult res = e->session.Submit(request);
  if (res.accepted) {
    e->events.push_back(res.message);
    e->cv.notify_all();
  }
  return res;
}

bool SessionManager::Abort(const std::string& id, const std::string& reason) {
  auto e = Find(id);
  if (!e) return false;
  {
    std::lock_guard lock(e->mu);
    if (!e->session.finished()) {
      e->session.Abort(reason);
      e->events.push_back(e->session.View());
      e->cv.notify_all();
    }
  }
  return true;
}

std::optional<json> SessionManager::Transcript(const std::string& id) {
  auto e = Find(id);
  if (!e) return std::nullopt;
  std::lock_guard lock(e->mu);
  return e->session.Transcript();
}

std::optional<std::vector<json>> SessionManager::Events(const std::string& id,
                                                        std::int64_t after,
                                                        int timeout_ms) {
  auto e = Find(id);
  if (!e) return std::nullopt;
  std::unique_lock lock(e->mu);
  auto has_new = [&] {
    return !e->events.empty() && e->events.back()["seq"].get<std::int64_t>() > after;
  };
  if (timeout_ms > 0) {
    e->cv.wait_for(lock, std::chrono::milliseconds(timeout_ms), has_new);
  }
  std::vector<json> out;
  for (const json& ev : e->events) {
    if (ev["seq"].get<std::int64_t>() > after) out.push_back(ev);
  }
  return out;
}

std::size_t SessionManager::AbortIdle(std::chrono::milliseconds max_idle) {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, e] : sessions_) entries.push_back(e);
  }
  const auto now = std::chrono::steady_clock::now();
  std::size_t aborted = 0;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mu);
    if (e->session.finished() || now - e->last_active < max_idle) continue;
    e->session.Abort("client_disconnected");
    e->events.push_back(e->session.View());
    e->cv.notify_all();
    ++aborted;
  }
  return aborted;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace trustsim
