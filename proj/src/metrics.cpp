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


#include "tablutzero/metrics.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tablutzero {
namespace {

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : ""; }

std::optional<double> opt_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> columns = {
      "iteration",         "policy_loss",      "value_loss",       "total_loss",
      "policy_entropy",    "mean_pieces_remaining", "attacker_winrate", "defender_winrate",
      "draw_rate",         "buffer_size",      "elo_estimate",     "games",
      "train_steps",       "optimizer_step"};
  return columns;
}

std::string metrics_header() {
  std::string out;
  for (const auto& c : metrics_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string metrics_line(const MetricsRow& r) {
  return fmt::format("{},{},{},{},{:.6f},{},{},{},{},{},{},{},{},{}", r.iteration, cell(r.policy_loss),
                     cell(r.value_loss), cell(r.total_loss), r.policy_entropy,
                     cell(r.mean_pieces_remaining), cell(r.attacker_winrate), cell(r.defender_winrate),
                     cell(r.draw_rate), r.buffer_size, cell(r.elo_estimate), r.games, r.train_steps,
                     r.optimizer_step);
}

MetricsRow parse_metrics_line(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != metrics_columns().size())
    throw std::invalid_argument("metrics line has " + std::to_string(f.size()) + " fields: " + line);
  MetricsRow r;
  r.iteration = std::stoi(f[0]);
  r.policy_loss = opt_cell(f[1]);
  r.value_loss = opt_cell(f[2]);
  r.total_loss = opt_cell(f[3]);
  r.policy_entropy = std::stod(f[4]);
  r.mean_pieces_remaining = opt_cell(f[5]);
  r.attacker_winrate = opt_cell(f[6]);
  r.defender_winrate = opt_cell(f[7]);
  r.draw_rate = opt_cell(f[8]);
  r.buffer_size = std::stoull(f[9]);
  r.elo_estimate = opt_cell(f[10]);
  r.games = std::stoi(f[11]);
  r.train_steps = std::stoi(f[12]);
  r.optimizer_step = std::stoll(f[13]);
  return r;
}

void append_metrics(const std::filesystem::path& path, const MetricsRow& row) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write metrics " + path.string());
  if (fresh) out << metrics_header() << '\n';
  out << metrics_line(row) << '\n';
  if (!out) throw std::runtime_error("failed writing metrics " + path.string());
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::vector<MetricsRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      if (line == metrics_header()) continue;
    }
    if (line.empty()) continue;
    rows.push_back(parse_metrics_line(line));
  }
  return rows;
}

void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << metrics_header() << '\n';
  for (const auto& r : rows) out << metrics_line(r) << '\n';
}

}  // namespace tablutzero
