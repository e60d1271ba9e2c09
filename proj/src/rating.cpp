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


#include "tablutzero/rating.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "tablutzero/errors.hpp"

namespace tablutzero {
namespace {

constexpr double kLn10Over400 = 2.302585092994046 / 400.0;

double logistic(double x) { return 1.0 / (1.0 + std::pow(10.0, -x / 400.0)); }
double logistic_slope(double x) {
  const double f = logistic(x);
  return kLn10Over400 * f * (1.0 - f);
}

// Matches collapsed to counts per (first, second) pair.
struct PairCounts {
  int first = 0, second = 0;  // indices into the agent list
  double wins = 0, draws = 0, losses = 0;
};

struct Problem {
  std::vector<std::string> agents;  // sorted
  std::vector<PairCounts> pairs;
};

Problem collapse(std::span<const MatchRecord> matches) {
  Problem p;
  std::set<std::string> names;
  for (const auto& m : matches) {
    if (m.first == m.second) throw ContractViolation("match between agent " + m.first + " and itself");
    names.insert(m.first);
    names.insert(m.second);
  }
  p.agents.assign(names.begin(), names.end());
  auto index = [&](const std::string& n) {
    return static_cast<int>(std::lower_bound(p.agents.begin(), p.agents.end(), n) - p.agents.begin());
  };
  std::map<std::pair<int, int>, PairCounts> grouped;
  for (const auto& m : matches) {
    const int a = index(m.first), b = index(m.second);
    auto& c = grouped[{a, b}];
    c.first = a;
    c.second = b;
    switch (m.result) {
      case MatchResult::kFirstWin: c.wins += 1; break;
      case MatchResult::kDraw: c.draws += 1; break;
      case MatchResult::kSecondWin: c.losses += 1; break;
    }
  }
  for (auto& [key, c] : grouped) p.pairs.push_back(c);
  return p;
}

double term(double weight, double prob) {
  if (weight == 0.0) return 0.0;
  if (!(prob > 0.0)) return -std::numeric_limits<double>::infinity();
  return weight * std::log(prob);
}

double pair_log_likelihood(const PairCounts& c, double d, double adv, double draw) {
  const double pf = logistic(d + adv - draw);
  const double ps = logistic(-d - adv - draw);
  const double pd = 1.0 - pf - ps;
  return term(c.wins, pf) + term(c.losses, ps) + term(c.draws, pd);
}

double total_log_likelihood(const Problem& p, const std::vector<double>& r, double adv, double draw) {
  double ll = 0.0;
  for (const auto& c : p.pairs) ll += pair_log_likelihood(c, r[c.first] - r[c.second], adv, draw);
  return ll;
}

template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  // The bracket ends are candidates too, so a maximum on the boundary is hit
  // exactly.
  double best = (a + b) / 2.0, best_f = f(best);
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > best_f) best = x, best_f = fx;
  }
  return best;
}

void check_connected(const Problem& p, const std::string& anchor) {
  const auto it = std::lower_bound(p.agents.begin(), p.agents.end(), anchor);
  if (it == p.agents.end() || *it != anchor)
    throw Unidentifiable(anchor, "anchor agent " + anchor + " has no games");
  const std::size_t n = p.agents.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& c : p.pairs) {
    adj[c.first].push_back(c.second);
    adj[c.second].push_back(c.first);
  }
  std::vector<bool> seen(n, false);
  std::deque<int> queue{static_cast<int>(it - p.agents.begin())};
  seen[queue.front()] = true;
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (int b : adj[a])
      if (!seen[b]) seen[b] = true, queue.push_back(b);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      throw Unidentifiable(p.agents[i], "agent " + p.agents[i] + " is not connected to anchor " + anchor);
}

}  // namespace

std::string_view match_result_name(MatchResult r) {
  switch (r) {
    case MatchResult::kFirstWin: return "FirstWin";
    case MatchResult::kSecondWin: return "SecondWin";
    case MatchResult::kDraw: return "Draw";
  }
  return "?";
}

GameProbabilities game_probabilities(double d, double adv, double draw) {
  if (!std::isfinite(d) || !std::isfinite(adv) || !std::isfinite(draw))
    throw InvalidParameter("rating parameters must be finite");
  if (draw < 0.0) throw InvalidParameter("draw parameter must be >= 0, got " + std::to_string(draw));
  GameProbabilities p;
  p.first = logistic(d + adv - draw);
  p.second = logistic(-d - adv - draw);
  p.draw = std::max(0.0, 1.0 - p.first - p.second);
  return p;
}

double log_likelihood(const RatingModel& model, std::span<const MatchRecord> matches) {
  double ll = 0.0;
  for (const auto& m : matches) {
    const auto a = model.ratings.find(m.first), b = model.ratings.find(m.second);
    if (a == model.ratings.end() || b == model.ratings.end())
      throw ContractViolation("match agent missing from the rating model");
    const auto p = game_probabilities(a->second - b->second, model.advantage, model.draw);
    const double q = m.result == MatchResult::kFirstWin    ? p.first
                     : m.result == MatchResult::kSecondWin ? p.second
                                                           : p.draw;
    if (!(q > 0.0)) {
      spdlog::warn("{} vs {}: observed {} has probability zero", m.first, m.second,
                   match_result_name(m.result));
      return -std::numeric_limits<double>::infinity();
    }
    ll += std::log(q);
  }
  return ll;
}

RatingGradient log_likelihood_gradient(const RatingModel& model,
                                       std::span<const MatchRecord> matches) {
  RatingGradient g;
  for (const auto& [name, r] : model.ratings) g.ratings[name] = 0.0;
  for (const auto& m : matches) {
    const double d = model.ratings.at(m.first) - model.ratings.at(m.second);
    const double u = d + model.advantage - model.draw;
    const double v = -d - model.advantage - model.draw;
    double dd = 0.0, ddraw = 0.0;
    switch (m.result) {
      case MatchResult::kFirstWin:
        dd = kLn10Over400 * (1.0 - logistic(u));
        ddraw = -dd;
        break;
      case MatchResult::kSecondWin:
        dd = -kLn10Over400 * (1.0 - logistic(v));
        ddraw = dd;
        break;
      case MatchResult::kDraw: {
        const double pd = 1.0 - logistic(u) - logistic(v);
        dd = (-logistic_slope(u) + logistic_slope(v)) / pd;
        ddraw = (logistic_slope(u) + logistic_slope(v)) / pd;
        break;
      }
    }
    g.ratings[m.first] += dd;
    g.ratings[m.second] -= dd;
    g.advantage += dd;
    g.draw += ddraw;
  }
  return g;
}

RatingModel fit(std::span<const MatchRecord> matches, const std::string& anchor,
                const FitOptions& options) {
  const Problem p = collapse(matches);
  check_connected(p, anchor);
  const std::size_t n = p.agents.size();
  const int anchor_index =
      static_cast<int>(std::lower_bound(p.agents.begin(), p.agents.end(), anchor) - p.agents.begin());
  const double line_tol = options.tolerance * 1e-2;

  std::vector<double> r(n, 0.0);
  double adv = 0.0, draw = 0.0;
  if (const RatingModel* init = options.initial) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = init->ratings.find(p.agents[i]);
      if (it != init->ratings.end() && static_cast<int>(i) != anchor_index) r[i] = it->second;
    }
    adv = init->advantage;
    draw = init->draw;
  }
  RatingModel model;
  for (model.sweeps = 0; model.sweeps < options.max_sweeps;) {
    ++model.sweeps;
    double change = 0.0;
    const double new_draw = golden_section_max(
        [&](double x) { return total_log_likelihood(p, r, adv, x); }, 0.0, options.cap, line_tol);
    change = std::max(change, std::abs(new_draw - draw));
    draw = new_draw;
    const double new_adv = golden_section_max(
        [&](double x) { return total_log_likelihood(p, r, x, draw); }, -options.cap, options.cap, line_tol);
    change = std::max(change, std::abs(new_adv - adv));
    adv = new_adv;
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i) == anchor_index) continue;
      const double old = r[i];
      const double best = golden_section_max(
          [&](double x) {
            r[i] = x;
            return total_log_likelihood(p, r, adv, draw);
          },
          -options.cap, options.cap, line_tol);
      r[i] = best;
      change = std::max(change, std::abs(best - old));
    }
    if (change < options.tolerance) {
      model.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    model.ratings[p.agents[i]] = r[i];
    if (std::abs(r[i]) >= options.cap - 1e-6) model.saturated.insert(p.agents[i]);
  }
  model.advantage = adv;
  model.draw = draw;
  return model;
}

std::map<std::string, int> games_played(std::span<const MatchRecord> matches) {
  std::map<std::string, int> out;
  for (const auto& m : matches) {
    ++out[m.first];
    ++out[m.second];
  }
  return out;
}

void EvalSchedule::validate() const {
  if (start_iteration < 0 || period < 1 || opponents_per_eval < 1 || pool_cap < 1)
    throw ConfigError("evaluation schedule values must be positive");
  if (games_per_pairing < 2 || games_per_pairing % 2 != 0)
    throw ConfigError("games_per_pairing must be a positive even number");
}

bool is_evaluation_iteration(int iteration, const EvalSchedule& sched) {
  return iteration >= sched.start_iteration && iteration % sched.period == 0;
}

std::vector<Pairing> schedule_evaluations(int iteration, std::span<const int> candidates,
                                          const EvalSchedule& sched, std::mt19937_64& rng) {
  if (iteration < 0) throw ContractViolation("iteration must be >= 0");
  if (!is_evaluation_iteration(iteration, sched)) return {};
  std::vector<int> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::erase(pool, iteration);
  std::vector<int> chosen;
  const std::size_t k = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(sched.opponents_per_eval));
  std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), k, rng);
  std::vector<Pairing> out;
  for (int it : chosen) out.push_back({it, sched.games_per_pairing, sched.games_per_pairing / 2});
  return out;
}

std::string agent_name(int iteration) { return "iter" + std::to_string(iteration); }

std::string match_to_json(const MatchRecord& m) {
  nlohmann::ordered_json j;
  j["first"] = m.first;
  j["second"] = m.second;
  j["result"] = std::string(match_result_name(m.result));
  return j.dump();
}

MatchRecord parse_match(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed match record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("first") || !j.contains("second") || !j.contains("result") ||
      !j["first"].is_string() || !j["second"].is_string() || !j["result"].is_string())
    throw std::invalid_argument("match record needs string fields first, second, result");
  MatchRecord m;
  m.first = j["first"];
  m.second = j["second"];
  const std::string r = j["result"];
  if (r == "FirstWin") {
    m.result = MatchResult::kFirstWin;
  } else if (r == "SecondWin") {
    m.result = MatchResult::kSecondWin;
  } else if (r == "Draw") {
    m.result = MatchResult::kDraw;
  } else {
    throw std::invalid_argument("unknown match result " + r);
  }
  if (m.first == m.second) throw std::invalid_argument("match between " + m.first + " and itself");
  return m;
}

void write_matches(std::ostream& out, std::span<const MatchRecord> matches) {
  for (const auto& m : matches) out << match_to_json(m) << '\n';
}

std::vector<MatchRecord> read_matches(std::istream& in) {
  std::vector<MatchRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_match(line));
  }
  return out;
}

void write_ratings_csv(std::ostream& out, const RatingModel& model,
                       std::span<const MatchRecord> matches) {
  const auto games = games_played(matches);
  std::vector<std::pair<std::string, double>> rows(model.ratings.begin(), model.ratings.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  out << "agent,elo,games\n";
  for (const auto& [name, elo] : rows) {
    const auto it = games.find(name);
    out << name << ',' << fmt::format("{:.1f}", elo) << ',' << (it == games.end() ? 0 : it->second)
        << '\n';
  }
}

}  // namespace tablutzero
