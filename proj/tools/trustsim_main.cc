// Command-line driver: data collection, training, evaluation, reports and
// human play (HTTP server or terminal).

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "trustsim/checkpoint.h"
#include "trustsim/config.h"
#include "trustsim/experiment.h"
#include "trustsim/server.h"
#include "trustsim/session.h"
#include "trustsim/terminal.h"

namespace fs = std::filesystem;
using namespace trustsim;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<bool> observe_p2;

  ExperimentConfig Load() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : LoadConfig(config_path);
    if (seed) cfg.master_seed = *seed;
    if (epochs) cfg.train.epochs = *epochs;
    if (observe_p2) cfg.robot_observes_p2_action = *observe_p2;
    cfg.Validate();
    return cfg;
  }
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "override master seed");
}

std::shared_ptr<const QNetwork> MaybeLoad(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const QNetwork>(LoadModel(path));
}

void WriteJson(const nlohmann::json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

nlohmann::json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

void PrintReport(const EvalReport& r) {
  std::cout << r.policy << ": accuracy " << r.accuracy_overall << " (low trust "
            << r.accuracy_low_trust << " over " << r.rounds_low_trust << " rounds, high trust "
            << r.accuracy_high_trust << " over " << r.rounds_high_trust
            << "), reverse psychology " << r.reverse_psych_counts.p2_cheat << " cheat / "
            << r.reverse_psych_counts.p2_honest << " honest\n";
}

SessionServer* g_server = nullptr;
void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trustsim: trust-aware robot advisor for a two-player Cheat game"};
  app.require_subcommand(1);
  Common common;

  auto* config_cmd = app.add_subcommand("config", "print the default configuration");
  std::string config_out;
  config_cmd->add_option("-o,--out", config_out, "write to a file instead of stdout");

  auto* collect = app.add_subcommand("collect", "simulate games and write dataset splits");
  AddCommon(collect, common);
  std::string data_dir = "data";
  std::optional<int> games;
  collect->add_option("-o,--out", data_dir, "dataset directory");
  collect->add_option("--games", games, "number of games")->check(CLI::PositiveNumber);
  collect->add_option("--observe-p2", common.observe_p2, "robot sees P2's move (true/false)");

  auto* train = app.add_subcommand("train", "train a CQL advisor on a dataset");
  AddCommon(train, common);
  std::string reward = "tp";
  std::string model_dir = "models";
  train->add_option("--reward", reward, "reward scheme")
      ->check(CLI::IsMember({"tp", "gt", "tom"}))->required();
  train->add_option("--data", data_dir, "dataset directory")->check(CLI::ExistingDirectory);
  train->add_option("-o,--out", model_dir, "output directory");
  train->add_option("--epochs", common.epochs, "override epoch count")->check(CLI::PositiveNumber);
  train->add_option("--observe-p2", common.observe_p2, "robot sees P2's move (true/false)");

  auto* eval = app.add_subcommand("eval", "evaluate one policy on evaluation seeds");
  AddCommon(eval, common);
  std::string policy, checkpoint, label, report_out, trajectories;
  eval->add_option("--policy", policy, "\"random\" or a checkpoint path")->required();
  eval->add_option("--label", label, "policy label in reports");
  eval->add_option("-o,--out", report_out, "write the report as JSON");
  eval->add_option("--trajectories", trajectories,
                   "write per-round trust trajectories (CSV)");
  eval->add_option("--observe-p2", common.observe_p2, "robot sees P2's move (true/false)");

  auto* report = app.add_subcommand("report", "build CSV tables from evaluation reports");
  std::vector<std::string> report_files;
  std::string report_dir = "report";
  report->add_option("reports", report_files, "report JSON files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", report_dir, "output directory");

  auto* run = app.add_subcommand("run", "collect, train all rewards, evaluate and report");
  AddCommon(run, common);
  std::string run_dir = "run";
  run->add_option("-o,--out", run_dir, "output directory");
  run->add_option("--epochs", common.epochs, "override epoch count")->check(CLI::PositiveNumber);
  run->add_option("--observe-p2", common.observe_p2, "robot sees P2's move (true/false)");

  std::string role = "p1";
  bool expose_trust = false;
  auto* serve = app.add_subcommand("serve", "serve human-play sessions over HTTP");
  AddCommon(serve, common);
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--role", role, "default human role")->check(CLI::IsMember({"p1", "p2"}));
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "bind address");
  serve->add_option("--checkpoint", checkpoint, "robot model (random advice if omitted)")
      ->check(CLI::ExistingFile);
  serve->add_flag("--expose-trust", expose_trust, "include the modelled trust in messages");
  int idle_seconds = 600;
  serve->add_option("--idle-timeout", idle_seconds,
                    "abort sessions without client activity for this many seconds (0: never)")
      ->check(CLI::NonNegativeNumber);

  auto* play = app.add_subcommand("play", "play one game in the terminal");
  AddCommon(play, common);
  std::string transcript_path;
  std::optional<std::uint64_t> game_seed;
  play->add_option("--role", role, "your role")->check(CLI::IsMember({"p1", "p2"}));
  play->add_option("--checkpoint", checkpoint, "robot model (random advice if omitted)")
      ->check(CLI::ExistingFile);
  play->add_option("--game-seed", game_seed, "seed for this game");
  play->add_option("--transcript", transcript_path, "save the transcript here");

  auto* replay = app.add_subcommand("replay", "re-run a transcript and check it reproduces");
  AddCommon(replay, common);
  replay->add_option("transcript", transcript_path, "transcript JSON")->required()->check(CLI::ExistingFile);
  replay->add_option("--checkpoint", checkpoint, "robot model used in the original game")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_cmd->parsed()) {
      const auto j = ConfigToJson(ExperimentConfig{});
      if (config_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        WriteJson(j, config_out);
      }
    } else if (collect->parsed()) {
      ExperimentConfig cfg = common.Load();
      if (games) cfg.collection_games = *games;
      const CollectResult r = Collect(cfg, data_dir);
      std::cout << "wrote " << r.train_games << " train, " << r.validation_games
                << " validation, " << r.test_games << " test games (" << r.transitions
                << " transitions) to " << data_dir << "\n";
    } else if (train->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const RewardKind kind = ParseRewardKind(reward);
      const TrainingRun r = RunTraining(cfg, kind, data_dir, model_dir);
      std::cout << "trained " << PolicyLabel(kind) << " for " << r.result.metrics.size()
                << " epochs; checkpoint " << r.checkpoint.string() << " (digest "
                << FileDigest(r.checkpoint) << "), test TD error " << r.test_td << "\n";
    } else if (eval->parsed()) {
      const ExperimentConfig cfg = common.Load();
      std::unique_ptr<QNetwork> net;
      AdvicePolicy advice = MakeRandomAdvice();
      if (policy != "random") {
        if (!fs::exists(policy)) throw std::runtime_error("no such checkpoint: " + policy);
        net = std::make_unique<QNetwork>(LoadModel(policy));
        if (net->input_width() != cfg.feature_width()) {
          throw std::runtime_error("checkpoint input width does not match config");
        }
        advice = MakeGreedyAdvice(*net);
      }
      if (label.empty()) label = policy == "random" ? "Random" : fs::path(policy).stem().string();
      std::vector<GameRecord> games;
      const EvalReport r = Evaluate(cfg, advice, label, &games);
      PrintReport(r);
      if (!report_out.empty()) SaveReport(r, report_out);
      if (!trajectories.empty()) WriteCsv(trajectories, TrajectoryTable(games));
    } else if (report->parsed()) {
      std::vector<EvalReport> reports;
      for (const auto& f : report_files) reports.push_back(LoadReport(f));
      const ReportFiles out = WriteReport(reports, report_dir);
      std::cout << "wrote " << out.accuracy.string() << ", " << out.reverse_psychology.string()
                << ", " << out.distribution.string() << "\n";
    } else if (run->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const fs::path root = run_dir;
      SaveConfig(cfg, root / "config.json");
      Collect(cfg, root / "data");
      std::vector<EvalReport> reports{EvaluateRandom(cfg)};
      PrintReport(reports.back());
      SaveReport(reports.back(), root / "reports" / "random.json");
      for (RewardKind k : {RewardKind::kTeamPerformance, RewardKind::kGlobalTrust, RewardKind::kTopTom}) {
        const TrainingRun tr = RunTraining(cfg, k, root / "data", root / "models");
        reports.push_back(EvaluateCheckpoint(cfg, tr.checkpoint, PolicyLabel(k)));
        PrintReport(reports.back());
        SaveReport(reports.back(), root / "reports" / (std::string(ToString(k)) + ".json"));
      }
      WriteReport(reports, root / "report");
    } else if (serve->parsed()) {
      const ExperimentConfig cfg = common.Load();
      SessionManager manager(cfg, MaybeLoad(checkpoint), ParseSessionRole(role),
                             SessionOptions{expose_trust});
      SessionServer server(manager);
      server.SetIdleTimeout(std::chrono::seconds(idle_seconds));
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      std::cout << "serving " << kProtocolVersion << " on http://" << host << ":" << port
                << std::endl;
      if (!server.Listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
    } else if (play->parsed()) {
      const ExperimentConfig cfg = common.Load();
      const std::uint64_t s = game_seed ? *game_seed : DeriveSeed(cfg.master_seed, kSessionStream, 0);
      Session session("terminal", ParseSessionRole(role), cfg, MaybeLoad(checkpoint), s);
      const auto transcript = PlayTerminal(session, std::cin, std::cout);
      if (!transcript_path.empty()) {
        WriteJson(transcript, transcript_path);
        std::cout << "transcript saved to " << transcript_path << "\n";
      }
    } else if (replay->parsed()) {
      const auto original = ReadJson(transcript_path);
      const ExperimentConfig cfg = common.config_path.empty()
                                       ? ConfigFromJson(original.at("config"))
                                       : common.Load();
      const auto again = ReplayTranscript(original, cfg, MaybeLoad(checkpoint));
      const bool same = again["rounds"] == original["rounds"];
      std::cout << (same ? "replay matches" : "replay differs") << " ("
                << again["rounds"].size() << " rounds)\n";
      return same ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
