#pragma once

// Experiment orchestration: collect a dataset with a random advisor, train
// one policy per reward scheme, evaluate policies on fresh games and
// tabulate accuracies and reverse-psychology counts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "trustsim/config.h"
#include "trustsim/csv.h"
#include "trustsim/simulation.h"

namespace trustsim {

std::vector<std::uint64_t> CollectionSeeds(const ExperimentConfig& cfg);
std::vector<std::uint64_t> EvaluationSeeds(const ExperimentConfig& cfg);

struct CollectResult {
  std::filesystem::path train;
  std::filesystem::path test;
  std::filesystem::path validation;
  std::size_t train_games = 0;
  std::size_t test_games = 0;
  std::size_t validation_games = 0;
  std::size_t transitions = 0;
};

// Writes train.jsonl, test.jsonl and validation.jsonl into `out_dir`.
CollectResult Collect(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct TrainingRun {
  std::filesystem::path checkpoint;       // final epoch
  std::filesystem::path best_checkpoint;  // lowest validation TD error
  std::filesystem::path metrics_csv;
  std::filesystem::path summary_json;
  TrainingResult result;
  double test_td = 0.0;
};

// Reads the dataset files from `data_dir` and writes <kind>.ckpt,
// <kind>.best.ckpt, <kind>_metrics.csv and <kind>_summary.json to `out_dir`.
TrainingRun RunTraining(const ExperimentConfig& cfg, RewardKind kind,
                        const std::filesystem::path& data_dir,
                        const std::filesystem::path& out_dir);

CsvTable MetricsTable(const std::vector<EpochMetrics>& metrics);
std::vector<EpochMetrics> MetricsFromTable(const CsvTable& table);

struct ReversePsychCounts {
  std::int64_t p2_cheat = 0;
  std::int64_t p2_honest = 0;

  bool operator==(const ReversePsychCounts&) const = default;
};

// Index of a (trust bucket, a_P2, a_R, a_P1) cell; bucket 0 = low trust.
constexpr int DistributionIndex(int low_trust, int a_p2, int a_r, int a_p1) {
  return (low_trust ? 0 : 8) + a_p2 * 4 + a_r * 2 + a_p1;
}

struct EvalReport {
  std::string policy;
  std::int64_t games = 0;
  std::int64_t rounds = 0;
  std::int64_t rounds_low_trust = 0;
  std::int64_t rounds_high_trust = 0;
  std::int64_t correct_low_trust = 0;
  std::int64_t correct_high_trust = 0;
  double accuracy_overall = 0.0;
  double accuracy_low_trust = 0.0;
  double accuracy_high_trust = 0.0;
  // Secondary readings: accuracy over advice-followed rounds, and buckets
  // by the robot's belief instead of the human's trust.
  std::int64_t rounds_followed = 0;
  double accuracy_followed = 0.0;
  std::int64_t rounds_low_belief = 0;
  double accuracy_low_belief = 0.0;
  double accuracy_high_belief = 0.0;
  ReversePsychCounts reverse_psych_counts;
  std::array<std::int64_t, 16> action_distribution{};

  bool operator==(const EvalReport&) const = default;
};

nlohmann::json ReportToJson(const EvalReport& r);
EvalReport ReportFromJson(const nlohmann::json& j);
void SaveReport(const EvalReport& r, const std::filesystem::path& path);
EvalReport LoadReport(const std::filesystem::path& path);

// A reverse-psychology event: E(T) below threshold, advice contradicting
// P2's move, and P1 doing the opposite of the advice.
bool IsReversePsychology(const RoundRecord& r, double threshold);

// Accumulates finished games into a report.
EvalReport Summarize(const std::string& label, const std::vector<GameRecord>& games,
                     double threshold);

// Plays cfg.eval_games games on evaluation seeds.
EvalReport Evaluate(const ExperimentConfig& cfg, const AdvicePolicy& policy,
                    const std::string& label,
                    std::vector<GameRecord>* games_out = nullptr);
EvalReport EvaluateRandom(const ExperimentConfig& cfg);
EvalReport EvaluateCheckpoint(const ExperimentConfig& cfg,
                              const std::filesystem::path& checkpoint,
                              const std::string& label);

// "TP", "GT", "ToPToM".
std::string PolicyLabel(RewardKind kind);

// One row per round: game_id, round, alpha, beta, mean, draw (the trust
// state before the decision and the value P1 acted on).
CsvTable TrajectoryTable(const std::vector<GameRecord>& games);

CsvTable AccuracyTable(const std::vector<EvalReport>& reports);
CsvTable ReversePsychTable(const std::vector<EvalReport>& reports);
CsvTable DistributionTable(const std::vector<EvalReport>& reports);

struct ReportFiles {
  std::filesystem::path accuracy;
  std::filesystem::path reverse_psychology;
  std::filesystem::path distribution;
};

// Throws std::invalid_argument on an empty report list.
ReportFiles WriteReport(const std::vector<EvalReport>& reports,
                        const std::filesystem::path& out_dir);

}  // namespace trustsim
