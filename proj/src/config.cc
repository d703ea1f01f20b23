#include "trustsim/config.h"

#include <fstream>
#include <stdexcept>
#include <string>

#include "trustsim/features.h"

namespace trustsim {

namespace {

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void RejectUnknown(const nlohmann::json& j, std::initializer_list<const char*> keys,
                   const std::string& section) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw std::invalid_argument("unknown config key: " + section + key);
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  game.Validate();
  initial_trust.Validate();
  gains.Validate();
  reward.Validate();
  train.Validate();
  if (!(initial_belief.b0 >= 0.0 && initial_belief.b1 >= 0.0) ||
      !(initial_belief.b0 + initial_belief.b1 > 0.0)) {
    throw std::invalid_argument("initial belief counts must be >= 0 with a positive sum");
  }
  if (collection_games < 5) throw std::invalid_argument("collection_games must be >= 5");
  if (eval_games < 0) throw std::invalid_argument("eval_games must be >= 0");
}

int ExperimentConfig::feature_width() const {
  return FeatureWidth(robot_observes_p2_action);
}

nlohmann::json ConfigToJson(const ExperimentConfig& c) {
  nlohmann::json j;
  j["game"] = {{"initial_hand_size", c.game.initial_hand_size},
               {"max_rounds", c.game.max_rounds},
               {"p2_cheat_prob", c.game.p2_cheat_prob},
               {"opponent_mode", ToString(c.game.opponent_mode)}};
  j["human"] = {
      {"initial_trust", {{"alpha", c.initial_trust.alpha}, {"beta", c.initial_trust.beta}}},
      {"gains",
       {{"success_honest", c.gains.success_honest},
        {"success_cheat", c.gains.success_cheat},
        {"failure_honest", c.gains.failure_honest},
        {"failure_cheat", c.gains.failure_cheat}}},
      {"risk", {{"w", c.risk.w}, {"a", c.risk.a}, {"b", c.risk.b}, {"offset", c.risk.offset}}}};
  j["robot"] = {
      {"initial_belief", {{"b0", c.initial_belief.b0}, {"b1", c.initial_belief.b1}}},
      {"observes_p2_action", c.robot_observes_p2_action},
      {"reward",
       {{"reward_alpha", c.reward.reward_alpha},
        {"reward_beta", c.reward.reward_beta},
        {"theta", c.reward.theta},
        {"mu", c.reward.mu}}}};
  const TrainConfig& t = c.train;
  j["train"] = {{"learning_rate", t.learning_rate},
                {"batch_size", t.batch_size},
                {"epochs", t.epochs},
                {"adam_beta1", t.adam_beta1},
                {"adam_beta2", t.adam_beta2},
                {"adam_epsilon", t.adam_epsilon},
                {"weight_decay", t.weight_decay},
                {"gamma", t.gamma},
                {"cql_alpha", t.cql_alpha},
                {"target_sync_interval", t.target_sync_interval},
                {"hidden_widths", t.hidden_widths},
                {"checkpoint_interval", t.checkpoint_interval},
                {"seed", t.seed}};
  j["collection_games"] = c.collection_games;
  j["eval_games"] = c.eval_games;
  j["trust_bucket_threshold"] = c.trust_bucket_threshold;
  j["master_seed"] = c.master_seed;
  return j;
}

ExperimentConfig ConfigFromJson(const nlohmann::json& j) {
  ExperimentConfig c;
  RejectUnknown(j, {"game", "human", "robot", "train", "collection_games", "eval_games",
                    "trust_bucket_threshold", "master_seed"},
                "");
  if (j.contains("game")) {
    const auto& g = j.at("game");
    RejectUnknown(g, {"initial_hand_size", "max_rounds", "p2_cheat_prob", "opponent_mode"},
                  "game.");
    Read(g, "initial_hand_size", c.game.initial_hand_size);
    Read(g, "max_rounds", c.game.max_rounds);
    Read(g, "p2_cheat_prob", c.game.p2_cheat_prob);
    if (g.contains("opponent_mode")) {
      c.game.opponent_mode = ParseOpponentMode(g.at("opponent_mode").get<std::string>());
    }
  }
  if (j.contains("human")) {
    const auto& h = j.at("human");
    RejectUnknown(h, {"initial_trust", "gains", "risk"}, "human.");
    if (h.contains("initial_trust")) {
      Read(h.at("initial_trust"), "alpha", c.initial_trust.alpha);
      Read(h.at("initial_trust"), "beta", c.initial_trust.beta);
    }
    if (h.contains("gains")) {
      const auto& g = h.at("gains");
      RejectUnknown(g, {"success_honest", "success_cheat", "failure_honest", "failure_cheat"},
                    "human.gains.");
      Read(g, "success_honest", c.gains.success_honest);
      Read(g, "success_cheat", c.gains.success_cheat);
      Read(g, "failure_honest", c.gains.failure_honest);
      Read(g, "failure_cheat", c.gains.failure_cheat);
    }
    if (h.contains("risk")) {
      const auto& r = h.at("risk");
      RejectUnknown(r, {"w", "a", "b", "offset"}, "human.risk.");
      Read(r, "w", c.risk.w);
      Read(r, "a", c.risk.a);
      Read(r, "b", c.risk.b);
      Read(r, "offset", c.risk.offset);
    }
  }
  if (j.contains("robot")) {
    const auto& r = j.at("robot");
    RejectUnknown(r, {"initial_belief", "observes_p2_action", "reward"}, "robot.");
    if (r.contains("initial_belief")) {
      Read(r.at("initial_belief"), "b0", c.initial_belief.b0);
      Read(r.at("initial_belief"), "b1", c.initial_belief.b1);
    }
    Read(r, "observes_p2_action", c.robot_observes_p2_action);
    if (r.contains("reward")) {
      const auto& w = r.at("reward");
      RejectUnknown(w, {"reward_alpha", "reward_beta", "theta", "mu"}, "robot.reward.");
      Read(w, "reward_alpha", c.reward.reward_alpha);
      Read(w, "reward_beta", c.reward.reward_beta);
      Read(w, "theta", c.reward.theta);
      Read(w, "mu", c.reward.mu);
    }
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    RejectUnknown(t, {"learning_rate", "batch_size", "epochs", "adam_beta1", "adam_beta2",
                      "adam_epsilon", "weight_decay", "gamma", "cql_alpha",
                      "target_sync_interval", "hidden_widths", "checkpoint_interval", "seed"},
                  "train.");
    Read(t, "learning_rate", c.train.learning_rate);
    Read(t, "batch_size", c.train.batch_size);
    Read(t, "epochs", c.train.epochs);
    Read(t, "adam_beta1", c.train.adam_beta1);
    Read(t, "adam_beta2", c.train.adam_beta2);
    Read(t, "adam_epsilon", c.train.adam_epsilon);
    Read(t, "weight_decay", c.train.weight_decay);
    Read(t, "gamma", c.train.gamma);
    Read(t, "cql_alpha", c.train.cql_alpha);
    Read(t, "target_sync_interval", c.train.target_sync_interval);
    Read(t, "hidden_widths", c.train.hidden_widths);
    Read(t, "checkpoint_interval", c.train.checkpoint_interval);
    Read(t, "seed", c.train.seed);
  }
  Read(j, "collection_games", c.collection_games);
  Read(j, "eval_games", c.eval_games);
  Read(j, "trust_bucket_threshold", c.trust_bucket_threshold);
  Read(j, "master_seed", c.master_seed);
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  return ConfigFromJson(nlohmann::json::parse(in));
}

void SaveConfig(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write config: " + path.string());
  out << ConfigToJson(cfg).dump(2) << '\n';
}

}  // namespace trustsim
