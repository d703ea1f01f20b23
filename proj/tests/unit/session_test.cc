#include "trustsim/session.h"

#include <thread>

#include <gtest/gtest.h>

namespace trustsim {
namespace {

using nlohmann::json;

json P1Action(const Session& s, const char* action) {
  return {{"round", s.round()}, {"action", action}};
}

// Plays a P1 session to the end, alternating call and pass.
void PlayOut(Session& s) {
  int i = 0;
  while (!s.finished()) {
    ASSERT_TRUE(s.Submit(P1Action(s, i++ % 2 ? "pass" : "call")).accepted);
  }
}

TEST(Session, P1GameRunsToCompletion) {
  Session s("a", SessionRole::kP1, ExperimentConfig{}, nullptr, 11);
  const json first = s.View();
  EXPECT_EQ(first["protocol"], kProtocolVersion);
  EXPECT_EQ(first["phase"], "p1_decide");
  EXPECT_EQ(first["hand"]["size"], 10);
  EXPECT_EQ(first["legal_actions"].size(), 2u);
  EXPECT_TRUE(first.contains("advice"));
  EXPECT_FALSE(first["claim"].contains("cheat"));
  PlayOut(s);
  const json t = s.Transcript();
  EXPECT_EQ(s.phase(), "finished");
  EXPECT_EQ(t["rounds"].size(), t["requests"].size());
  EXPECT_GE(t["rounds"].size(), 1u);
  EXPECT_EQ(t["summary"]["status"], "finished");
  EXPECT_TRUE(s.View()["legal_actions"].empty());
}

TEST(Session, TenRoundGameYieldsTenOutcomes) {
  // Find a seed where P2 keeps cards for the full ten rounds.
  for (std::uint64_t seed = 1; seed < 50; ++seed) {
    Session s("a", SessionRole::kP1, ExperimentConfig{}, nullptr, seed);
    PlayOut(s);
    const json t = s.Transcript();
    if (t["summary"]["cards_p2"].get<int>() == 0) continue;
    EXPECT_EQ(t["rounds"].size(), 10u);
    EXPECT_EQ(t["summary"]["rounds"], 10);
    return;
  }
  FAIL() << "no ten-round game found";
}

TEST(Session, OutOfTurnIsRejectedWithoutStateChange) {
  Session s("a", SessionRole::kP1, ExperimentConfig{}, nullptr, 3);
  const json before = s.View();
  auto r = s.Submit({{"round", 4}, {"action", "call"}});
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.reason, "out_of_turn");
  EXPECT_EQ(r.message["type"], "rejected");
  EXPECT_EQ(s.View(), before);

  r = s.Submit({{"round", 0}, {"action", "claim"}, {"rank", "K"}, {"m", 1}});
  EXPECT_EQ(r.reason, "out_of_turn");
  r = s.Submit({{"round", 0}, {"action", "fold"}});
  EXPECT_EQ(r.reason, "illegal_action");
  r = s.Submit(json::array());
  EXPECT_EQ(r.reason, "malformed_request");
  r = s.Submit({{"action", "call"}});
  EXPECT_EQ(r.reason, "malformed_request");
  EXPECT_EQ(s.View(), before);
}

TEST(Session, FinishedSessionRejectsActions) {
  Session s("a", SessionRole::kP1, ExperimentConfig{}, nullptr, 3);
  PlayOut(s);
  EXPECT_EQ(s.Submit(P1Action(s, "call")).reason, "session_finished");
}

TEST(Session, OutcomeHidesUnrevealedCards) {
  Session s("a", SessionRole::kP1, ExperimentConfig{}, nullptr, 5);
  auto r = s.Submit(P1Action(s, "pass"));
  EXPECT_FALSE(r.message["outcome"]["revealed"].get<bool>());
  EXPECT_FALSE(r.message["outcome"].contains("a_p2"));
  EXPECT_FALSE(r.message["outcome"].contains("actual"));
  EXPECT_EQ(r.message["outcome"]["result"], "pass");
  if (s.finished()) return;
  r = s.Submit(P1Action(s, "call"));
  EXPECT_TRUE(r.message["outcome"].contains("a_p2"));
  EXPECT_NE(r.message["outcome"]["result"], "pass");
  EXPECT_EQ(r.message["history"].size(), 2u);
}

TEST(Session, TrustTrajectoryOnlyMovesOnReveals) {
  Session s("a", SessionRole::kP1, ExperimentConfig{}, nullptr, 8, SessionOptions{true});
  PlayOut(s);
  const json v = s.View();
  const auto& traj = v["trust"];
  const auto& hist = v["history"];
  ASSERT_EQ(traj.size(), hist.size() + 1);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (!hist[i]["revealed"].get<bool>()) EXPECT_EQ(traj[i + 1], traj[i]);
  }
  Session hidden("b", SessionRole::kP1, ExperimentConfig{}, nullptr, 8);
  EXPECT_FALSE(hidden.View().contains("trust"));
}

TEST(Session, P2IllegalClaimIsRejected) {
  Session s("p2", SessionRole::kP2, ExperimentConfig{}, nullptr, 21);
  const json v = s.View();
  EXPECT_EQ(v["phase"], "p2_claim");
  EXPECT_TRUE(v["claim"].is_null());
  EXPECT_FALSE(v.contains("advice"));
  // A rank held at most once, claimed three times honestly.
  const auto counts = v["hand"]["counts"].get<std::vector<int>>();
  int rank = 0;
  while (counts[rank] > 1) ++rank;
  auto r = s.Submit({{"round", 0}, {"action", "claim"}, {"rank", rank}, {"m", 3}, {"cheat", false}});
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.reason, "illegal_action");
  EXPECT_EQ(r.message["detail"], "infeasible_honest_claim");
  EXPECT_EQ(s.View(), v);
  r = s.Submit({{"round", 0}, {"action", "call"}});
  EXPECT_EQ(r.reason, "out_of_turn");
}

TEST(Session, P2PlaysLegalActionsToTheEnd) {
  Session s("p2", SessionRole::kP2, ExperimentConfig{}, nullptr, 4);
  int k = 0;
  while (!s.finished()) {
    const json v = s.View();
    const auto& legal = v["legal_actions"];
    ASSERT_FALSE(legal.empty());
    json req = legal[(k * 7) % legal.size()];
    req["round"] = s.round();
    const auto r = s.Submit(req);
    ASSERT_TRUE(r.accepted) << r.reason << " " << req.dump();
    EXPECT_FALSE(r.message["outcome"].contains("advice"));
    ++k;
  }
  const json t = s.Transcript();
  EXPECT_EQ(t["rounds"].size(), static_cast<std::size_t>(k));
  for (const auto& round : t["rounds"]) {
    EXPECT_GE(round["trust_draw"].get<double>(), 0.0);
    EXPECT_LE(round["trust_draw"].get<double>(), 1.0);
  }
}

TEST(Session, P2ExplicitDiscard) {
  Session s("p2", SessionRole::kP2, ExperimentConfig{}, nullptr, 4);
  const auto counts = s.View()["hand"]["counts"].get<std::vector<int>>();
  int held = 0;
  while (counts[held] == 0) ++held;
  const int named = (held + 1) % kNumRanks;
  if (counts[named] > 0) GTEST_SKIP();
  json req = {{"round", 0}, {"action", "claim"}, {"rank", RankName(Rank(named))},
              {"m", 1}, {"cheat", true}, {"discard", {RankName(Rank(held))}}};
  ASSERT_TRUE(s.Submit(req).accepted);
  const json t = s.Transcript();
  EXPECT_EQ(t["rounds"][0]["claim"]["actual"][held], 1);
}

TEST(Session, SeedsIsolateSessions) {
  Session a("a", SessionRole::kP1, ExperimentConfig{}, nullptr, 100);
  Session b("b", SessionRole::kP1, ExperimentConfig{}, nullptr, 200);
  Session c("c", SessionRole::kP1, ExperimentConfig{}, nullptr, 100);
  PlayOut(a);
  PlayOut(b);
  PlayOut(c);
  EXPECT_NE(a.Transcript()["rounds"], b.Transcript()["rounds"]);
  EXPECT_EQ(a.Transcript()["rounds"], c.Transcript()["rounds"]);
}

TEST(Session, ReplayReproducesTranscript) {
  for (SessionRole role : {SessionRole::kP1, SessionRole::kP2}) {
    Session s("r", role, ExperimentConfig{}, nullptr, 77);
    int k = 0;
    while (!s.finished() && k < 6) {
      json req = s.View()["legal_actions"][k % 2];
      req["round"] = s.round();
      ASSERT_TRUE(s.Submit(req).accepted);
      ++k;
    }
    s.Abort("test");
    const json t = s.Transcript();
    EXPECT_EQ(ReplayTranscript(t, ExperimentConfig{}, nullptr), t);
  }
}

TEST(Session, CheckpointRobotAdvisesGreedily) {
  Rng rng(5);
  auto net = std::make_shared<const QNetwork>(QNetwork::Initialized({5, 8, 2}, rng));
  Session s("g", SessionRole::kP1, ExperimentConfig{}, net, 9);
  while (!s.finished()) {
    const json v = s.View();
    const int advice = v["advice"] == "call" ? 1 : 0;
    s.Submit(P1Action(s, "call"));
    const json round = s.Transcript()["rounds"].back();
    RobotObservation obs;
    obs.m = round["observation"]["m"];
    obs.n = round["observation"]["n"];
    obs.b0 = round["observation"]["b0"];
    obs.b1 = round["observation"]["b1"];
    obs.p2_action = round["observation"]["p2_action"];
    EXPECT_EQ(advice, GreedyPolicy(*net, obs));
    EXPECT_EQ(round["outcome"]["a_r"], advice);
  }
  auto narrow = std::make_shared<const QNetwork>(QNetwork({4, 2}));
  EXPECT_THROW(Session("x", SessionRole::kP1, ExperimentConfig{}, narrow, 1),
               std::invalid_argument);
}

TEST(SessionManager, EventsAndAbort) {
  SessionManager mgr(ExperimentConfig{}, nullptr, SessionRole::kP1);
  const json a = mgr.Create(std::nullopt, 1);
  const json b = mgr.Create(SessionRole::kP2, std::nullopt);
  EXPECT_NE(a["session_id"], b["session_id"]);
  EXPECT_EQ(b["role"], "p2");
  EXPECT_EQ(mgr.size(), 2u);
  const std::string id = a["session_id"];

  auto events = mgr.Events(id, 0, 0);
  ASSERT_TRUE(events);
  ASSERT_EQ(events->size(), 1u);
  EXPECT_EQ((*events)[0]["seq"], 1);

  std::thread submitter([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    mgr.Submit(id, {{"round", 0}, {"action", "call"}});
  });
  events = mgr.Events(id, 1, 5000);
  submitter.join();
  ASSERT_EQ(events->size(), 1u);
  EXPECT_EQ((*events)[0]["seq"], 2);

  // Rejections do not produce events.
  mgr.Submit(id, {{"round", 0}, {"action", "call"}});
  EXPECT_TRUE(mgr.Events(id, 2, 0)->empty());

  EXPECT_TRUE(mgr.Abort(id, "bye"));
  EXPECT_EQ((*mgr.View(id))["phase"], "aborted");
  EXPECT_EQ((*mgr.View(b["session_id"]))["phase"], "p2_claim");
  EXPECT_FALSE(mgr.View("nope"));
  EXPECT_FALSE(mgr.Submit("nope", json::object()));
}

TEST(SessionManager, IdleSessionsAreAborted) {
  SessionManager mgr(ExperimentConfig{}, nullptr, SessionRole::kP1);
  const std::string id = mgr.Create(std::nullopt, 1)["session_id"];
  std::this_thread::sleep_for(std::chrono::milliseconds(30));
  EXPECT_EQ(mgr.AbortIdle(std::chrono::hours(1)), 0u);
  EXPECT_EQ(mgr.AbortIdle(std::chrono::milliseconds(10)), 1u);
  const json t = *mgr.Transcript(id);
  EXPECT_TRUE(t["aborted"].get<bool>());
  EXPECT_EQ(t["summary"]["abort_reason"], "client_disconnected");
}

}  // namespace
}  // namespace trustsim
