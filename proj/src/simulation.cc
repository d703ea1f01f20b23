#include "trustsim/simulation.h"

namespace trustsim {

AdvicePolicy MakeRandomAdvice() {
  return [](const RobotObservation&, Rng& rng) { return RandomPolicy(rng); };
}

AdvicePolicy MakeGreedyAdvice(const QNetwork& net) {
  return [&net](const RobotObservation& obs, Rng&) { return GreedyPolicy(net, obs); };
}

GameStreams SplitGameSeed(std::uint64_t game_seed) {
  return {DeriveSeed(game_seed, 1, 0), DeriveSeed(game_seed, 2, 0),
          DeriveSeed(game_seed, 3, 0)};
}

GameRecord SimulateGame(const ExperimentConfig& cfg, std::uint64_t game_seed,
                        std::int64_t game_id, const AdvicePolicy& policy) {
  const GameStreams streams = SplitGameSeed(game_seed);
  GameState state = NewGame(cfg.game, streams.deal);
  Rng human_rng(streams.human);
  Rng robot_rng(streams.robot);
  TrustState trust = cfg.initial_trust;
  BeliefState belief = cfg.initial_belief;

  GameRecord game;
  game.game_id = game_id;
  game.seed = game_seed;
  while (!IsTerminal(state)) {
    RoundRecord rec;
    rec.round = state.round_index;
    rec.claim = OpponentClaim(state);
    rec.obs.m = rec.claim.m;
    rec.obs.n = CountClaimedRank(state.hand_p1, rec.claim.rank);
    rec.obs.b0 = belief.b0;
    rec.obs.b1 = belief.b1;
    rec.obs.p2_action = rec.claim.cheat;

    const int a_r = policy(rec.obs, robot_rng);
    rec.trust_before = trust;
    rec.trust_mean = TrustMean(trust);
    rec.trust_draw = SampleTrust(trust, human_rng);
    rec.p_risk = RiskCoefficient(rec.obs.m, rec.obs.n, cfg.risk);
    const int a_p1 =
        SampleP1Action(P1ActionProbs(rec.trust_draw, rec.p_risk, a_r), human_rng);

    rec.outcome = ResolveRound(state, rec.claim, a_p1, a_r);
    trust = UpdateTrust(trust, rec.outcome.a_p2, a_r, a_p1, cfg.gains);
    belief = UpdateBelief(belief, rec.outcome);
    rec.trust_after = trust;
    rec.belief_after = belief;
    game.rounds.push_back(rec);
  }
  game.final_hand_p1 = state.hand_p1;
  game.final_hand_p2 = state.hand_p2;
  return game;
}

Episode ToEpisode(const GameRecord& game) {
  Episode ep;
  for (std::size_t i = 0; i < game.rounds.size(); ++i) {
    const RoundRecord& r = game.rounds[i];
    Transition t;
    t.obs = r.obs;
    t.action = r.outcome.a_r;
    t.done = i + 1 == game.rounds.size();
    if (t.done) {
      t.next_obs = r.obs;
      t.next_obs.b0 = r.belief_after.b0;
      t.next_obs.b1 = r.belief_after.b1;
    } else {
      t.next_obs = game.rounds[i + 1].obs;
    }
    t.info.a_p2 = r.outcome.a_p2;
    t.info.a_p1 = r.outcome.a_p1;
    t.info.dc_p1 = r.outcome.dc_p1;
    t.info.dc_p2 = r.outcome.dc_p2;
    t.info.trust_mean = r.trust_mean;
    t.info.trust_draw = r.trust_draw;
    t.info.m = r.outcome.m;
    t.info.n = r.outcome.n;
    t.info.game_id = game.game_id;
    t.info.round = r.round;
    ep.push_back(t);
  }
  return ep;
}

}  // namespace trustsim
