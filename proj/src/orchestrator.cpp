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


#include "tablutzero/orchestrator.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <regex>

#include "tablutzero/agents.hpp"
#include "tablutzero/checkpoint.hpp"
#include "tablutzero/errors.hpp"
#include "tablutzero/replay_buffer.hpp"
#include "tablutzero/selfplay.hpp"
#include "tablutzero/tablut_search.hpp"

namespace tablutzero {
namespace fs = std::filesystem;

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream, index};
  std::mt19937_64 rng(seq);
  return rng();
}

enum Stream : std::uint32_t { kInitStream = 1, kSelfPlayStream, kTrainStream, kEvalStream, kScheduleStream };

std::map<std::string, std::uint64_t> seeds_of(const RunConfig& cfg) {
  return {{"run", cfg.seed}, {"init", derive_seed(cfg.seed, kInitStream, 0)}};
}

void append_lines(const fs::path& path, const std::vector<std::string>& lines) {
  if (lines.empty()) return;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

std::vector<MatchRecord> read_match_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  return read_matches(in);
}

std::optional<double> rating_of(const fs::path& matches, const std::string& agent) {
  const auto all = read_match_file(matches);
  if (all.empty()) return std::nullopt;
  try {
    const auto model = fit(all, agent_name(0));
    const auto it = model.ratings.find(agent);
    if (it == model.ratings.end()) return std::nullopt;
    return it->second;
  } catch (const Unidentifiable&) {
    return std::nullopt;
  }
}

struct TrainTotals {
  double policy = 0.0, value = 0.0, total = 0.0;
  int steps = 0;
};

TrainTotals train_iteration(const RunConfig& cfg, int iteration, Params<float>& params,
                            OptState<float>& opt, const ReplayBuffer& buffer) {
  TrainTotals t;
  if (buffer.size() < static_cast<std::size_t>(cfg.batch_size)) {
    spdlog::info("iteration {}: buffer holds {} of {} samples, skipping optimizer steps", iteration,
                 buffer.size(), cfg.batch_size);
    return t;
  }
  std::mt19937_64 rng(derive_seed(cfg.seed, kTrainStream, static_cast<std::uint32_t>(iteration)));
  for (int s = 0; s < cfg.steps_per_iteration(); ++s) {
    const auto batch = buffer.sample(cfg.batch_size, rng, cfg.augmentation);
    auto lg = loss_and_gradients(params, batch);
    if (!std::isfinite(lg.terms.total))
      throw TrainingDivergence(fmt::format("iteration {}: non-finite loss at optimizer step {}", iteration,
                                           opt.step));
    try {
      adamw_update(params, lg.grads, opt);
    } catch (const TrainingDivergence& e) {
      throw TrainingDivergence(fmt::format("iteration {}: {}", iteration, e.what()));
    }
    t.policy += lg.terms.policy_ce;
    t.value += lg.terms.value_mse;
    t.total += lg.terms.total;
    ++t.steps;
  }
  return t;
}

}  // namespace

RunPaths::RunPaths(fs::path root)
    : dir(root),
      checkpoints(root / "checkpoints"),
      metrics(root / "metrics.csv"),
      matches(root / "matches.jsonl"),
      games(root / "games.jsonl"),
      config(root / "config.json") {}

fs::path RunPaths::checkpoint(int iteration) const {
  return checkpoints / fmt::format("ckpt_{:06d}.tzc", iteration);
}

std::vector<int> RunPaths::checkpoint_iterations() const {
  std::vector<int> out;
  if (!fs::is_directory(checkpoints)) return out;
  static const std::regex pattern(R"(ckpt_(\d{6})\.tzc)");
  for (const auto& e : fs::directory_iterator(checkpoints)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, pattern)) out.push_back(std::stoi(m[1]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TrainSummary cmd_train(const RunConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  const RunPaths paths(cfg.output_dir);
  fs::create_directories(paths.checkpoints);

  OptimizerConfig hyper = cfg.optimizer;
  hyper.total_steps = static_cast<std::int64_t>(cfg.steps_per_iteration()) * cfg.iterations;

  TrainSummary summary;
  Params<float> params;
  OptState<float> opt;
  OpponentPool pool(cfg.evaluation.pool_cap);
  int start = 1;

  const auto existing = paths.checkpoint_iterations();
  if (existing.empty()) {
    save_run_config(paths.config, cfg);
    fs::remove(paths.metrics);
    fs::remove(paths.matches);
    fs::remove(paths.games);
    params = init_params<float>(cfg.net, derive_seed(cfg.seed, kInitStream, 0));
    opt = OptState<float>::init(params, hyper);
    Checkpoint c{0, seeds_of(cfg), params, opt};
    save_checkpoint(paths.checkpoint(0), c);
    pool.set_anchor(0, paths.checkpoint(0), std::make_shared<const Params<float>>(params));
    spdlog::info("initialized run in {} (anchor iteration 0)", paths.dir.string());
  } else {
    const int last = existing.back();
    Checkpoint c = load_checkpoint(paths.checkpoint(last));
    if (!(c.params.config() == cfg.net))
      throw ConfigError("checkpoint " + paths.checkpoint(last).string() +
                        " does not match the configured network");
    params = std::move(c.params);
    opt = c.optimizer ? std::move(*c.optimizer) : OptState<float>::init(params, hyper);
    opt.hyper = hyper;
    pool.set_anchor(0, paths.checkpoint(0));
    for (int it : existing)
      if (it > 0 && is_evaluation_iteration(it, cfg.evaluation)) pool.add(it, paths.checkpoint(it));
    auto rows = read_metrics(paths.metrics);
    std::erase_if(rows, [&](const MetricsRow& r) { return r.iteration > last; });
    {
      std::ofstream out(paths.metrics, std::ios::trunc);
      write_metrics(out, rows);
    }
    start = last + 1;
    summary.resumed = true;
    spdlog::info("resuming {} after iteration {}", paths.dir.string(), last);
  }
  summary.first_iteration = start;
  summary.last_iteration = start - 1;
  if (start > cfg.iterations) return summary;

  SelfPlayConfig sp = cfg.selfplay;
  sp.past_opponent_fraction = cfg.past_opponent_fraction();
  SelfPlayRunner runner(sp, derive_seed(cfg.seed, kSelfPlayStream, static_cast<std::uint32_t>(start)));
  ReplayBuffer buffer(cfg.buffer_capacity());

  if (summary.resumed) {
    for (int pass = 0; pass < cfg.buffer_iterations && buffer.size() < static_cast<std::size_t>(cfg.batch_size);
         ++pass) {
      const auto warm = runner.run_iteration(params, start - 1, pool, buffer);
      spdlog::info("buffer warmup pass {}: {} games, buffer {}", pass + 1, warm.games, buffer.size());
    }
  }

  for (int it = start; it <= cfg.iterations; ++it) {
    const IterationStats stats = runner.run_iteration(params, it, pool, buffer);
    const TrainTotals totals = train_iteration(cfg, it, params, opt, buffer);

    std::vector<std::string> match_lines;
    std::mt19937_64 sched_rng(derive_seed(cfg.seed, kScheduleStream, static_cast<std::uint32_t>(it)));
    const auto candidates = pool.iterations();
    const auto pairings = schedule_evaluations(it, candidates, cfg.evaluation, sched_rng);
    if (!pairings.empty()) {
      const Agent me{agent_name(it), std::make_shared<const Params<float>>(params), cfg.eval_simulations,
                     cfg.selfplay.max_considered_actions};
      for (std::size_t k = 0; k < pairings.size(); ++k) {
        const auto& pr = pairings[k];
        std::size_t index = 0;
        while (candidates[index] != pr.opponent_iteration) ++index;
        const Agent other{agent_name(pr.opponent_iteration), pool.params(index), cfg.eval_simulations,
                          cfg.selfplay.max_considered_actions};
        const auto played = play_games(me, other, pr.games, pr.candidate_attacker_games,
                                       derive_seed(cfg.seed, kEvalStream,
                                                   static_cast<std::uint32_t>(it * 64 + static_cast<int>(k))));
        for (const auto& g : played) match_lines.push_back(match_to_json(g.match));
      }
    }

    Checkpoint c{it, seeds_of(cfg), params, opt};
    save_checkpoint(paths.checkpoint(it), c);
    if (!pairings.empty())
      pool.add(it, paths.checkpoint(it), std::make_shared<const Params<float>>(params));
    append_lines(paths.matches, match_lines);
    if (opts.log_games) {
      std::vector<std::string> lines;
      for (const auto& r : stats.records) lines.push_back(to_jsonl(r));
      append_lines(paths.games, lines);
    }

    MetricsRow row;
    row.iteration = it;
    if (totals.steps > 0) {
      row.policy_loss = totals.policy / totals.steps;
      row.value_loss = totals.value / totals.steps;
      row.total_loss = totals.total / totals.steps;
    }
    row.policy_entropy = stats.mean_root_entropy;
    if (stats.games > 0) {
      row.mean_pieces_remaining = stats.mean_pieces_remaining;
      row.attacker_winrate = static_cast<double>(stats.attacker_wins) / stats.games;
      row.defender_winrate = static_cast<double>(stats.defender_wins) / stats.games;
      row.draw_rate = static_cast<double>(stats.draws) / stats.games;
    }
    row.buffer_size = stats.buffer_size;
    if (!pairings.empty()) row.elo_estimate = rating_of(paths.matches, agent_name(it));
    row.games = stats.games;
    row.train_steps = totals.steps;
    row.optimizer_step = opt.step;
    append_metrics(paths.metrics, row);
    summary.rows.push_back(row);
    summary.last_iteration = it;
    spdlog::info("iteration {}: {} games (A {} / D {} / draw {}), entropy {:.3f}, buffer {}, {} steps{}", it,
                 stats.games, stats.attacker_wins, stats.defender_wins, stats.draws, stats.mean_root_entropy,
                 stats.buffer_size, totals.steps,
                 totals.steps > 0 ? fmt::format(", loss {:.4f}", totals.total / totals.steps) : "");
    if (opts.stop_after && it >= *opts.stop_after) break;
  }
  return summary;
}

std::vector<MatchRecord> cmd_eval(const EvalOptions& opts, std::ostream& out) {
  if (opts.games_per_opponent < 2 || opts.games_per_opponent % 2 != 0)
    throw ConfigError("games per opponent must be a positive even number");
  if (opts.opponents.empty()) throw ConfigError("eval needs at least one opponent");
  const Checkpoint cand = load_checkpoint(opts.candidate);
  const Agent me{agent_name(cand.iteration), std::make_shared<const Params<float>>(cand.params),
                 opts.simulations, 16};
  std::vector<MatchRecord> records;
  for (std::size_t k = 0; k < opts.opponents.size(); ++k) {
    Agent other;
    if (opts.opponents[k] == "random") {
      other = Agent::random();
    } else {
      const Checkpoint c = load_checkpoint(opts.opponents[k]);
      if (!(c.params.config() == cand.params.config()))
        throw CheckpointError("checkpoint " + opts.opponents[k] +
                              " has a network configuration incompatible with the candidate");
      other = Agent{agent_name(c.iteration), std::make_shared<const Params<float>>(c.params),
                    opts.simulations, 16};
    }
    if (other.name == me.name) other.name += "#2";
    const auto played = play_games(me, other, opts.games_per_opponent, opts.games_per_opponent / 2,
                                   derive_seed(opts.seed, kEvalStream, static_cast<std::uint32_t>(k)));
    for (const auto& g : played) {
      out << match_to_json(g.match) << '\n';
      records.push_back(g.match);
    }
  }
  return records;
}

RatingModel cmd_rate(const std::vector<fs::path>& files, std::ostream& out,
                     const std::optional<fs::path>& csv, const std::string& anchor) {
  std::vector<MatchRecord> all;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("cannot open match file " + f.string());
    const auto m = read_matches(in);
    all.insert(all.end(), m.begin(), m.end());
  }
  if (all.empty()) throw ConfigError("no matches to rate; usage: rate MATCHES.jsonl...");
  const RatingModel model = fit(all, anchor);
  write_ratings_csv(out, model, all);
  out << fmt::format("# first-mover advantage {:.1f}, draw {:.1f}, {} sweeps{}\n", model.advantage,
                     model.draw, model.sweeps, model.converged ? "" : " (not converged)");
  for (const auto& name : model.saturated) out << "# " << name << " is held at the rating cap\n";
  if (csv) {
    std::ofstream f(*csv);
    if (!f) throw std::runtime_error("cannot write " + csv->string());
    write_ratings_csv(f, model, all);
  }
  return model;
}

int cmd_play(const fs::path& checkpoint, Side human, int simulations, std::uint64_t seed, std::istream& in,
             std::ostream& out) {
  const Checkpoint c = load_checkpoint(checkpoint);
  std::mt19937_64 rng(seed);
  GameState s = GameState::initial();
  std::optional<SearchResult> last;
  out << "You play the " << side_name(human) << ". Enter moves like e3-e5, or moves, dump, quit.\n";
  for (;;) {
    out << render_board(s.board());
    if (s.is_terminal()) {
      const Outcome& o = *s.outcome();
      out << "Game over: " << result_name(o.result) << " (" << reason_name(o.reason) << ")\n";
      return 0;
    }
    if (s.to_move() != human) {
      const auto legal = legal_moves(s);
      Move m = legal.front();
      if (legal.size() > 1) {
        SearchRequest r{s, &c.params, {}};
        r.config.simulations = simulations;
        r.config.rng_seed = rng();
        last = run_searches(std::span(&r, 1)).front();
        m = action_to_move(last->chosen_action);
      }
      out << "Agent plays " << move_name(m) << '\n';
      s = apply_move(s, m);
      continue;
    }
    for (;;) {
      out << side_name(human) << "> " << std::flush;
      std::string line;
      if (!std::getline(in, line)) {
        out << '\n';
        return 0;
      }
      line.erase(0, line.find_first_not_of(" \t"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (line.empty()) continue;
      if (line == "quit") return 0;
      if (line == "moves") {
        for (const auto& m : legal_moves(s)) out << move_name(m) << ' ';
        out << '\n';
        continue;
      }
      if (line == "dump") {
        if (last) {
          out << root_dump(*last).dump() << '\n';
        } else {
          out << "no search yet\n";
        }
        continue;
      }
      const auto m = parse_move(line);
      if (!m || !is_legal(s, *m)) {
        out << "Illegal move " << line << ". Legal moves:";
        for (const auto& lm : legal_moves(s)) out << ' ' << move_name(lm);
        out << '\n';
        continue;
      }
      s = apply_move(s, *m);
      break;
    }
  }
}

void cmd_export_metrics(const fs::path& run_dir, std::ostream& out) {
  if (!fs::is_directory(run_dir)) throw ConfigError("run directory " + run_dir.string() + " does not exist");
  write_metrics(out, read_metrics(RunPaths(run_dir).metrics));
}

}  // namespace tablutzero
