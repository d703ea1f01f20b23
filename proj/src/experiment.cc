#include "trustsim/experiment.h"

#include <fstream>
#include <stdexcept>

#include "trustsim/checkpoint.h"

namespace trustsim {

namespace {

double Ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::uint64_t> Seeds(const ExperimentConfig& cfg, std::uint64_t stream,
                                 int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    seeds.push_back(DeriveSeed(cfg.master_seed, stream, static_cast<std::uint64_t>(i)));
  }
  return seeds;
}

}  // namespace

std::vector<std::uint64_t> CollectionSeeds(const ExperimentConfig& cfg) {
  return Seeds(cfg, kCollectStream, cfg.collection_games);
}

std::vector<std::uint64_t> EvaluationSeeds(const ExperimentConfig& cfg) {
  return Seeds(cfg, kEvalStream, cfg.eval_games);
}

CollectResult Collect(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.Validate();
  std::filesystem::create_directories(out_dir);
  const AdvicePolicy random = MakeRandomAdvice();
  const auto seeds = CollectionSeeds(cfg);

  std::vector<Episode> episodes;
  episodes.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    episodes.push_back(
        ToEpisode(SimulateGame(cfg, seeds[i], static_cast<std::int64_t>(i), random)));
  }
  DatasetSplits splits = SplitEpisodes(std::move(episodes));

  DatasetHeader header;
  header.master_seed = cfg.master_seed;
  header.config = ConfigToJson(cfg);

  CollectResult res;
  res.train = out_dir / "train.jsonl";
  res.test = out_dir / "test.jsonl";
  res.validation = out_dir / "validation.jsonl";
  WriteDataset(res.train, splits.train, header);
  WriteDataset(res.test, splits.test, header);
  WriteDataset(res.validation, splits.validation, header);
  res.train_games = splits.train.episodes.size();
  res.test_games = splits.test.episodes.size();
  res.validation_games = splits.validation.episodes.size();
  res.transitions = splits.train.NumTransitions() + splits.test.NumTransitions() +
                    splits.validation.NumTransitions();
  return res;
}

CsvTable MetricsTable(const std::vector<EpochMetrics>& metrics) {
  CsvTable t;
  t.header = {"epoch", "loss", "cql_term", "td_term", "val_td"};
  for (const auto& m : metrics) {
    t.rows.push_back({std::to_string(m.epoch), FormatDouble(m.loss),
                      FormatDouble(m.cql_term), FormatDouble(m.td_term),
                      FormatDouble(m.val_td)});
  }
  return t;
}

std::vector<EpochMetrics> MetricsFromTable(const CsvTable& table) {
  std::vector<EpochMetrics> out;
  for (const auto& row : table.rows) {
    if (row.size() != 5) throw std::invalid_argument("metrics row must have 5 fields");
    out.push_back({std::stoi(row[0]), ParseDouble(row[1]), ParseDouble(row[2]),
                   ParseDouble(row[3]), ParseDouble(row[4])});
  }
  return out;
}

TrainingRun RunTraining(const ExperimentConfig& cfg, RewardKind kind,
                        const std::filesystem::path& data_dir,
                        const std::filesystem::path& out_dir) {
  cfg.Validate();
  for (const char* name : {"train.jsonl", "validation.jsonl", "test.jsonl"}) {
    if (!std::filesystem::exists(data_dir / name)) {
      throw std::runtime_error("missing dataset file: " + (data_dir / name).string());
    }
  }
  const Dataset train = ReadDataset(data_dir / "train.jsonl");
  const Dataset validation = ReadDataset(data_dir / "validation.jsonl");
  const Dataset test = ReadDataset(data_dir / "test.jsonl");
  std::filesystem::create_directories(out_dir);

  const std::string stem(ToString(kind));
  TrainConfig tc = cfg.train;
  tc.seed = DeriveSeed(cfg.master_seed, kTrainStream, cfg.train.seed);
  TrainOptions options;
  options.checkpoint_prefix = out_dir / stem;

  TrainingRun run;
  run.result = Train(train, &validation, kind, cfg.reward, tc, cfg.feature_width(), options);
  run.checkpoint = out_dir / (stem + ".ckpt");
  run.best_checkpoint = out_dir / (stem + ".best.ckpt");
  run.metrics_csv = out_dir / (stem + "_metrics.csv");
  run.summary_json = out_dir / (stem + "_summary.json");
  SaveModel(run.result.network, run.checkpoint);
  SaveModel(run.result.best_network, run.best_checkpoint);
  WriteCsv(run.metrics_csv, MetricsTable(run.result.metrics));

  const FeatureDataset test_fd =
      BuildFeatureDataset(test, RelabelRewards(test, kind, cfg.reward), cfg.feature_width());
  run.test_td = MeanTdError(test_fd, run.result.network, run.result.network, tc.gamma);

  nlohmann::json summary;
  summary["reward"] = stem;
  summary["epochs"] = run.result.metrics.size();
  summary["gradient_steps"] = run.result.gradient_steps;
  summary["final_loss"] = run.result.metrics.empty() ? 0.0 : run.result.metrics.back().loss;
  summary["best_epoch"] = run.result.best_epoch;
  summary["test_td"] = run.test_td;
  summary["checkpoint_digest"] = FileDigest(run.checkpoint);
  std::ofstream(run.summary_json, std::ios::trunc) << summary.dump(2) << '\n';
  return run;
}

nlohmann::json ReportToJson(const EvalReport& r) {
  nlohmann::json j;
  j["policy"] = r.policy;
  j["games"] = r.games;
  j["rounds"] = r.rounds;
  j["rounds_low_trust"] = r.rounds_low_trust;
  j["rounds_high_trust"] = r.rounds_high_trust;
  j["correct_low_trust"] = r.correct_low_trust;
  j["correct_high_trust"] = r.correct_high_trust;
  j["accuracy_overall"] = r.accuracy_overall;
  j["accuracy_low_trust"] = r.accuracy_low_trust;
  j["accuracy_high_trust"] = r.accuracy_high_trust;
  j["rounds_followed"] = r.rounds_followed;
  j["accuracy_followed"] = r.accuracy_followed;
  j["rounds_low_belief"] = r.rounds_low_belief;
  j["accuracy_low_belief"] = r.accuracy_low_belief;
  j["accuracy_high_belief"] = r.accuracy_high_belief;
  j["reverse_psych_counts"] = {{"p2_cheat", r.reverse_psych_counts.p2_cheat},
                               {"p2_honest", r.reverse_psych_counts.p2_honest}};
  j["action_distribution"] = r.action_distribution;
  return j;
}

EvalReport ReportFromJson(const nlohmann::json& j) {
  EvalReport r;
  r.policy = j.at("policy").get<std::string>();
  r.games = j.at("games").get<std::int64_t>();
  r.rounds = j.at("rounds").get<std::int64_t>();
  r.rounds_low_trust = j.at("rounds_low_trust").get<std::int64_t>();
  r.rounds_high_trust = j.at("rounds_high_trust").get<std::int64_t>();
  r.correct_low_trust = j.at("correct_low_trust").get<std::int64_t>();
  r.correct_high_trust = j.at("correct_high_trust").get<std::int64_t>();
  r.accuracy_overall = j.at("accuracy_overall").get<double>();
  r.accuracy_low_trust = j.at("accuracy_low_trust").get<double>();
  r.accuracy_high_trust = j.at("accuracy_high_trust").get<double>();
  r.rounds_followed = j.at("rounds_followed").get<std::int64_t>();
  r.accuracy_followed = j.at("accuracy_followed").get<double>();
  r.rounds_low_belief = j.at("rounds_low_belief").get<std::int64_t>();
  r.accuracy_low_belief = j.at("accuracy_low_belief").get<double>();
  r.accuracy_high_belief = j.at("accuracy_high_belief").get<double>();
  r.reverse_psych_counts.p2_cheat = j.at("reverse_psych_counts").at("p2_cheat").get<std::int64_t>();
  r.reverse_psych_counts.p2_honest =
      j.at("reverse_psych_counts").at("p2_honest").get<std::int64_t>();
  r.action_distribution = j.at("action_distribution").get<std::array<std::int64_t, 16>>();
  return r;
}

void SaveReport(const EvalReport& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ReportToJson(r).dump(2) << '\n';
}

EvalReport LoadReport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ReportFromJson(nlohmann::json::parse(in));
}

bool IsReversePsychology(const RoundRecord& r, double threshold) {
  const RoundOutcome& o = r.outcome;
  return r.trust_mean < threshold && o.a_r != o.a_p2 && o.a_p1 != o.a_r;
}

EvalReport Summarize(const std::string& label, const std::vector<GameRecord>& games,
                     double threshold) {
  EvalReport rep;
  rep.policy = label;
  rep.games = static_cast<std::int64_t>(games.size());
  std::int64_t correct_followed = 0;
  std::int64_t correct_low_belief = 0, correct_high_belief = 0;
  for (const auto& g : games) {
    for (const auto& r : g.rounds) {
      const RoundOutcome& o = r.outcome;
      const bool low = r.trust_mean < threshold;
      const bool correct = o.a_p1 == o.a_p2;
      ++rep.rounds;
      if (low) {
        ++rep.rounds_low_trust;
        rep.correct_low_trust += correct;
      } else {
        ++rep.rounds_high_trust;
        rep.correct_high_trust += correct;
      }
      if (o.a_p1 == o.a_r) {
        ++rep.rounds_followed;
        correct_followed += correct;
      }
      if (BeliefTrust({r.obs.b0, r.obs.b1}) < threshold) {
        ++rep.rounds_low_belief;
        correct_low_belief += correct;
      } else {
        correct_high_belief += correct;
      }
      if (IsReversePsychology(r, threshold)) {
        (o.a_p2 == 1 ? rep.reverse_psych_counts.p2_cheat
                     : rep.reverse_psych_counts.p2_honest) += 1;
      }
      ++rep.action_distribution[DistributionIndex(low, o.a_p2, o.a_r, o.a_p1)];
    }
  }
  rep.accuracy_overall = Ratio(rep.correct_low_trust + rep.correct_high_trust, rep.rounds);
  rep.accuracy_low_trust = Ratio(rep.correct_low_trust, rep.rounds_low_trust);
  rep.accuracy_high_trust = Ratio(rep.correct_high_trust, rep.rounds_high_trust);
  rep.accuracy_followed = Ratio(correct_followed, rep.rounds_followed);
  rep.accuracy_low_belief = Ratio(correct_low_belief, rep.rounds_low_belief);
  rep.accuracy_high_belief =
      Ratio(correct_high_belief, rep.rounds - rep.rounds_low_belief);
  return rep;
}

EvalReport Evaluate(const ExperimentConfig& cfg, const AdvicePolicy& policy,
                    const std::string& label, std::vector<GameRecord>* games_out) {
  cfg.Validate();
  const auto seeds = EvaluationSeeds(cfg);
  std::vector<GameRecord> games;
  games.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    games.push_back(SimulateGame(cfg, seeds[i], static_cast<std::int64_t>(i), policy));
  }
  EvalReport rep = Summarize(label, games, cfg.trust_bucket_threshold);
  if (games_out != nullptr) *games_out = std::move(games);
  return rep;
}

EvalReport EvaluateRandom(const ExperimentConfig& cfg) {
  return Evaluate(cfg, MakeRandomAdvice(), "Random");
}

EvalReport EvaluateCheckpoint(const ExperimentConfig& cfg,
                              const std::filesystem::path& checkpoint,
                              const std::string& label) {
  const QNetwork net = LoadModel(checkpoint);
  if (net.input_width() != cfg.feature_width()) {
    throw std::invalid_argument("checkpoint input width does not match the config");
  }
  return Evaluate(cfg, MakeGreedyAdvice(net), label);
}

std::string PolicyLabel(RewardKind kind) {
  switch (kind) {
    case RewardKind::kTeamPerformance: return "TP";
    case RewardKind::kGlobalTrust: return "GT";
    case RewardKind::kTopTom: return "ToPToM";
  }
  return "TP";
}

CsvTable TrajectoryTable(const std::vector<GameRecord>& games) {
  CsvTable t;
  t.header = {"game_id", "round", "alpha", "beta", "mean", "draw"};
  for (const GameRecord& g : games) {
    for (const RoundRecord& r : g.rounds) {
      t.rows.push_back({std::to_string(g.game_id), std::to_string(r.round),
                        FormatDouble(r.trust_before.alpha), FormatDouble(r.trust_before.beta),
                        FormatDouble(r.trust_mean), FormatDouble(r.trust_draw)});
    }
  }
  return t;
}

CsvTable AccuracyTable(const std::vector<EvalReport>& reports) {
  CsvTable t;
  t.header = {"policy", "trust_low", "trust_high", "all", "rounds_low", "rounds_high",
              "accuracy_followed", "accuracy_low_belief", "accuracy_high_belief"};
  for (const auto& r : reports) {
    t.rows.push_back({r.policy, FormatDouble(r.accuracy_low_trust),
                      FormatDouble(r.accuracy_high_trust), FormatDouble(r.accuracy_overall),
                      std::to_string(r.rounds_low_trust), std::to_string(r.rounds_high_trust),
                      FormatDouble(r.accuracy_followed), FormatDouble(r.accuracy_low_belief),
                      FormatDouble(r.accuracy_high_belief)});
  }
  return t;
}

CsvTable ReversePsychTable(const std::vector<EvalReport>& reports) {
  const EvalReport* tp = nullptr;
  for (const auto& r : reports) {
    if (r.policy == "TP") tp = &r;
  }
  CsvTable t;
  t.header = {"policy", "p2_cheat", "p2_honest", "cheat_ratio_vs_tp"};
  for (const auto& r : reports) {
    std::string ratio;
    if (tp != nullptr && tp->reverse_psych_counts.p2_cheat > 0) {
      ratio = FormatDouble(Ratio(r.reverse_psych_counts.p2_cheat,
                                 tp->reverse_psych_counts.p2_cheat));
    }
    t.rows.push_back({r.policy, std::to_string(r.reverse_psych_counts.p2_cheat),
                      std::to_string(r.reverse_psych_counts.p2_honest), ratio});
  }
  return t;
}

CsvTable DistributionTable(const std::vector<EvalReport>& reports) {
  CsvTable t;
  t.header = {"policy", "trust_bucket", "a_p2", "a_r", "a_p1", "count"};
  for (const auto& r : reports) {
    for (int low : {1, 0}) {
      for (int a_p2 = 0; a_p2 < 2; ++a_p2) {
        for (int a_r = 0; a_r < 2; ++a_r) {
          for (int a_p1 = 0; a_p1 < 2; ++a_p1) {
            t.rows.push_back(
                {r.policy, low ? "low" : "high", std::to_string(a_p2), std::to_string(a_r),
                 std::to_string(a_p1),
                 std::to_string(r.action_distribution[DistributionIndex(low, a_p2, a_r, a_p1)])});
          }
        }
      }
    }
  }
  return t;
}

ReportFiles WriteReport(const std::vector<EvalReport>& reports,
                        const std::filesystem::path& out_dir) {
  if (reports.empty()) throw std::invalid_argument("report needs at least one evaluation");
  std::filesystem::create_directories(out_dir);
  ReportFiles files{out_dir / "accuracy.csv", out_dir / "reverse_psychology.csv",
                    out_dir / "action_distribution.csv"};
  WriteCsv(files.accuracy, AccuracyTable(reports));
  WriteCsv(files.reverse_psychology, ReversePsychTable(reports));
  WriteCsv(files.distribution, DistributionTable(reports));
  return files;
}

}  // namespace trustsim
