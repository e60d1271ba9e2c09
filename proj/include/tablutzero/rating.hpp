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


// Elo ratings from match results under the three-outcome logistic model:
//   f(x) = 1 / (1 + 10^(-x / 400))
//   P(first wins)  = f(d + adv - draw)
//   P(second wins) = f(-d - adv - draw)
//   P(draw)        = the remainder
// with d the first mover's rating minus the second's. The first mover is the
// attacker.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace tablutzero {

enum class MatchResult : std::uint8_t { kFirstWin, kSecondWin, kDraw };

std::string_view match_result_name(MatchResult r);

struct MatchRecord {
  std::string first;   // plays the attacker
  std::string second;
  MatchResult result = MatchResult::kDraw;

  bool operator==(const MatchRecord&) const = default;
};

struct GameProbabilities {
  double first = 0.0;
  double draw = 0.0;
  double second = 0.0;
};

// Throws InvalidParameter when draw < 0 or an argument is not finite.
GameProbabilities game_probabilities(double d, double adv, double draw);

struct RatingModel {
  std::map<std::string, double> ratings;
  double advantage = 0.0;
  double draw = 0.0;
  std::set<std::string> saturated;  // ratings held at the cap
  int sweeps = 0;
  bool converged = false;
};

// Sum of log P(observed result). Returns -infinity, with a logged warning,
// when some observation has probability zero.
double log_likelihood(const RatingModel& model, std::span<const MatchRecord> matches);

struct RatingGradient {
  std::map<std::string, double> ratings;
  double advantage = 0.0;
  double draw = 0.0;
};

RatingGradient log_likelihood_gradient(const RatingModel& model,
                                       std::span<const MatchRecord> matches);

struct FitOptions {
  double tolerance = 0.01;  // Elo, largest change over one sweep
  int max_sweeps = 10000;
  double cap = 1200.0;
  // Starting point; agents it does not list start at 0.
  const RatingModel* initial = nullptr;
};

// Maximum likelihood with the anchor pinned at 0. Each sweep maximizes the
// draw parameter, the advantage and then every rating in name order by a
// golden-section search over [-cap, cap] ([0, cap] for draw). Throws
// Unidentifiable when an agent has no chain of games to the anchor.
RatingModel fit(std::span<const MatchRecord> matches, const std::string& anchor,
                const FitOptions& options = {});

std::map<std::string, int> games_played(std::span<const MatchRecord> matches);

struct EvalSchedule {
  int start_iteration = 20;
  int period = 5;
  int opponents_per_eval = 4;
  int pool_cap = 10;
  int games_per_pairing = 8;

  bool operator==(const EvalSchedule&) const = default;

  void validate() const;
};

struct Pairing {
  int opponent_iteration = 0;
  int games = 0;
  int candidate_attacker_games = 0;
};

bool is_evaluation_iteration(int iteration, const EvalSchedule& sched);

// Opponents are sampled without replacement from `candidates` (the pool with
// its anchor).
std::vector<Pairing> schedule_evaluations(int iteration, std::span<const int> candidates,
                                          const EvalSchedule& sched, std::mt19937_64& rng);

std::string agent_name(int iteration);  // "iter12"

std::string match_to_json(const MatchRecord& m);
// Throws std::invalid_argument on malformed lines.
MatchRecord parse_match(const std::string& line);
void write_matches(std::ostream& out, std::span<const MatchRecord> matches);
std::vector<MatchRecord> read_matches(std::istream& in);

// "agent,elo,games" with agents sorted by descending rating.
void write_ratings_csv(std::ostream& out, const RatingModel& model,
                       std::span<const MatchRecord> matches);

}  // namespace tablutzero
