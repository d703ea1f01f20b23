#include "trustsim/dataset.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "trustsim/features.h"

namespace trustsim {

namespace {

void ObsToJson(nlohmann::json& j, std::string_view prefix, const RobotObservation& o) {
  const std::string p(prefix);
  j[p + "m"] = o.m;
  j[p + "n"] = o.n;
  j[p + "b0"] = o.b0;
  j[p + "b1"] = o.b1;
  j[p + "p2_action"] = o.p2_action;
}

RobotObservation ObsFromJson(const nlohmann::json& j, std::string_view prefix) {
  const std::string p(prefix);
  RobotObservation o;
  o.m = j.at(p + "m").get<int>();
  o.n = j.at(p + "n").get<int>();
  o.b0 = j.at(p + "b0").get<double>();
  o.b1 = j.at(p + "b1").get<double>();
  o.p2_action = j.at(p + "p2_action").get<int>();
  return o;
}

}  // namespace

std::string_view ToString(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kValidation: return "validation";
  }
  return "train";
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  if (text == "validation") return Split::kValidation;
  throw std::invalid_argument("unknown split: " + std::string(text));
}

std::size_t Dataset::NumTransitions() const {
  std::size_t total = 0;
  for (const auto& ep : episodes) total += ep.size();
  return total;
}

DatasetSplits SplitEpisodes(std::vector<Episode> episodes) {
  const std::size_t n = episodes.size();
  const auto holdout = static_cast<std::size_t>(std::lround(n / 5.0));
  const std::size_t n_train = n - 2 * holdout;
  DatasetSplits out;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& dst = i < n_train ? out.train
                   : i < n_train + holdout ? out.test
                                           : out.validation;
    dst.episodes.push_back(std::move(episodes[i]));
  }
  return out;
}

nlohmann::json TransitionToJson(const Transition& t) {
  nlohmann::json j;
  j["record"] = "transition";
  j["game_id"] = t.info.game_id;
  j["round"] = t.info.round;
  ObsToJson(j, "obs_", t.obs);
  j["action"] = t.action;
  ObsToJson(j, "next_", t.next_obs);
  j["done"] = t.done;
  j["a_p2"] = t.info.a_p2;
  j["a_p1"] = t.info.a_p1;
  j["dc_p1"] = t.info.dc_p1;
  j["dc_p2"] = t.info.dc_p2;
  j["trust_mean"] = t.info.trust_mean;
  j["trust_draw"] = t.info.trust_draw;
  j["m"] = t.info.m;
  j["n"] = t.info.n;
  return j;
}

Transition TransitionFromJson(const nlohmann::json& j) {
  Transition t;
  t.obs = ObsFromJson(j, "obs_");
  t.action = j.at("action").get<int>();
  t.next_obs = ObsFromJson(j, "next_");
  t.done = j.at("done").get<bool>();
  t.info.game_id = j.at("game_id").get<std::int64_t>();
  t.info.round = j.at("round").get<int>();
  t.info.a_p2 = j.at("a_p2").get<int>();
  t.info.a_p1 = j.at("a_p1").get<int>();
  t.info.dc_p1 = j.at("dc_p1").get<int>();
  t.info.dc_p2 = j.at("dc_p2").get<int>();
  t.info.trust_mean = j.at("trust_mean").get<double>();
  t.info.trust_draw = j.at("trust_draw").get<double>();
  t.info.m = j.at("m").get<int>();
  t.info.n = j.at("n").get<int>();
  return t;
}

void WriteDataset(const std::filesystem::path& path, const Dataset& ds,
                  const DatasetHeader& header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open dataset for writing: " + path.string());
  nlohmann::json h;
  h["record"] = "header";
  h["schema_version"] = header.schema_version;
  h["split"] = ToString(ds.split);
  h["master_seed"] = header.master_seed;
  h["games"] = ds.episodes.size();
  h["transitions"] = ds.NumTransitions();
  h["config"] = header.config;
  out << h.dump() << '\n';
  for (const auto& ep : ds.episodes) {
    for (const auto& t : ep) out << TransitionToJson(t).dump() << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Dataset ReadDataset(const std::filesystem::path& path, DatasetHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path.string());
  const auto h = nlohmann::json::parse(line);
  if (h.value("record", "") != "header") {
    throw std::runtime_error("dataset missing header record: " + path.string());
  }
  if (h.at("schema_version").get<int>() != kDatasetSchemaVersion) {
    throw std::runtime_error("unsupported dataset schema version in " + path.string());
  }
  Dataset ds;
  ds.split = ParseSplit(h.at("split").get<std::string>());
  if (header != nullptr) {
    header->schema_version = h.at("schema_version").get<int>();
    header->split = ds.split;
    header->master_seed = h.at("master_seed").get<std::uint64_t>();
    header->config = h.value("config", nlohmann::json::object());
  }
  std::int64_t current_game = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Transition t = TransitionFromJson(nlohmann::json::parse(line));
    if (ds.episodes.empty() || t.info.game_id != current_game) {
      ds.episodes.emplace_back();
      current_game = t.info.game_id;
    }
    ds.episodes.back().push_back(t);
  }
  return ds;
}

std::vector<double> RelabelRewards(const Dataset& ds, RewardKind kind,
                                   const RewardParams& rp) {
  std::vector<double> rewards;
  rewards.reserve(ds.NumTransitions());
  for (const auto& ep : ds.episodes) {
    for (const auto& t : ep) {
      const double trust = BeliefTrust({t.obs.b0, t.obs.b1});
      rewards.push_back(Reward(kind, t.info.dc_p1, t.info.dc_p2, trust, rp));
    }
  }
  return rewards;
}

Batch FeatureDataset::Gather(std::span<const std::int64_t> rows) const {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Batch b;
  b.features.resize(features.rows(), n);
  b.next_features.resize(next_features.rows(), n);
  b.actions.resize(rows.size());
  b.rewards.resize(rows.size());
  b.done.resize(rows.size());
  b.rows.assign(rows.begin(), rows.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    b.features.col(i) = features.col(r);
    b.next_features.col(i) = next_features.col(r);
    b.actions[i] = actions[r];
    b.rewards[i] = rewards[r];
    b.done[i] = done[r];
  }
  return b;
}

Batch FeatureDataset::All() const {
  std::vector<std::int64_t> rows(size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::int64_t>(i);
  return Gather(rows);
}

FeatureDataset BuildFeatureDataset(const Dataset& ds,
                                   const std::vector<double>& rewards,
                                   int feature_width) {
  const std::size_t n = ds.NumTransitions();
  if (rewards.size() != n) throw std::invalid_argument("reward count mismatch");
  FeatureDataset fd;
  fd.features.resize(feature_width, static_cast<Eigen::Index>(n));
  fd.next_features.resize(feature_width, static_cast<Eigen::Index>(n));
  fd.actions.reserve(n);
  fd.rewards = rewards;
  fd.done.reserve(n);
  Eigen::Index col = 0;
  for (const auto& ep : ds.episodes) {
    for (const auto& t : ep) {
      Featurize(t.obs, std::span<double>(fd.features.col(col).data(), feature_width));
      Featurize(t.next_obs,
                std::span<double>(fd.next_features.col(col).data(), feature_width));
      fd.actions.push_back(t.action);
      fd.done.push_back(t.done ? 1 : 0);
      ++col;
    }
  }
  return fd;
}

}  // namespace trustsim
