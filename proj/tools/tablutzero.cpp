// Copyright 2026 The TablutZero Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tablutzero/errors.hpp"
#include "tablutzero/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace tablutzero;

namespace {

fs::path default_out(const std::string& fallback) {
  if (const char* env = std::getenv("TABLUTZERO_OUT"); env && *env) return env;
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TablutZero: self-play training, evaluation and rating for Tablut"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset, out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base random seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "Output directory (default $TABLUTZERO_OUT)");
  app.add_option("--preset", preset, "Ablation preset")
      ->check(CLI::IsMember({"baseline", "aug_buffer", "full"}));
  app.add_option("--threads", threads, "Worker threads; 1 is deterministic")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Run or resume a training run");
  int stop_after = -1;
  train->add_option("--stop-after", stop_after, "Stop after this iteration");

  auto* eval = app.add_subcommand("eval", "Play a checkpoint against opponents, writing match JSONL");
  std::string candidate;
  std::vector<std::string> opponents;
  int games = 8, sims = 32;
  std::string matches_out;
  eval->add_option("candidate", candidate, "Candidate checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("opponents", opponents, "Opponent checkpoints or 'random'")->required();
  eval->add_option("--games", games, "Games per opponent (even)");
  eval->add_option("--simulations", sims, "Search simulations per move");
  eval->add_option("--matches", matches_out, "Write matches here instead of standard output");

  auto* rate = app.add_subcommand("rate", "Fit ratings to match files");
  std::vector<std::string> match_files;
  std::string csv_out;
  std::string anchor = "iter0";
  rate->add_option("matches", match_files, "Match JSONL files")->required();
  rate->add_option("--csv", csv_out, "Also write the table to this CSV file");
  rate->add_option("--anchor", anchor, "Agent pinned at rating 0");

  auto* play = app.add_subcommand("play", "Play against a checkpoint in the terminal");
  std::string play_ckpt, human = "defender";
  int play_sims = 64;
  play->add_option("checkpoint", play_ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  play->add_option("--side", human, "Your side")->check(CLI::IsMember({"attacker", "defender"}));
  play->add_option("--simulations", play_sims, "Agent search simulations");

  auto* export_metrics = app.add_subcommand("export-metrics", "Print a run's metrics CSV");
  std::string run_dir;
  export_metrics->add_option("run_dir", run_dir, "Run directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (!preset.empty()) cfg = apply_preset(cfg, preset);
      if (seed_set) cfg.seed = seed;
      cfg.selfplay.threads = threads;
      if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
      } else if (const char* env = std::getenv("TABLUTZERO_OUT"); env && *env && config_path.empty()) {
        cfg.output_dir = env;
      }
      TrainOptions opts;
      if (stop_after >= 0) opts.stop_after = stop_after;
      const auto summary = cmd_train(cfg, opts);
      spdlog::info("finished iterations {}..{} in {}", summary.first_iteration, summary.last_iteration,
                   cfg.output_dir);
    } else if (eval->parsed()) {
      EvalOptions opts{candidate, opponents, games, sims, seed};
      if (matches_out.empty()) {
        cmd_eval(opts, std::cout);
      } else {
        std::ofstream f(matches_out);
        if (!f) throw std::runtime_error("cannot write " + matches_out);
        cmd_eval(opts, f);
      }
    } else if (rate->parsed()) {
      std::vector<fs::path> files(match_files.begin(), match_files.end());
      std::optional<fs::path> csv;
      if (!csv_out.empty()) csv = csv_out;
      cmd_rate(files, std::cout, csv, anchor);
    } else if (play->parsed()) {
      return cmd_play(play_ckpt, human == "attacker" ? Side::kAttacker : Side::kDefender, play_sims, seed,
                      std::cin, std::cout);
    } else if (export_metrics->parsed()) {
      cmd_export_metrics(run_dir.empty() ? default_out("runs/default") : fs::path(run_dir), std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Unidentifiable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
