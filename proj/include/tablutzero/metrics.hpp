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


#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tablutzero {

// One row of the training metrics CSV. Losses are means over the iteration's
// optimizer steps and are absent when no step ran; the game rates are absent
// when no game finished.
struct MetricsRow {
  int iteration = 0;
  std::optional<double> policy_loss;
  std::optional<double> value_loss;
  std::optional<double> total_loss;
  double policy_entropy = 0.0;  // mean root prior entropy over self-play moves
  std::optional<double> mean_pieces_remaining;
  std::optional<double> attacker_winrate;
  std::optional<double> defender_winrate;
  std::optional<double> draw_rate;
  std::size_t buffer_size = 0;
  std::optional<double> elo_estimate;
  int games = 0;
  int train_steps = 0;
  std::int64_t optimizer_step = 0;

  bool operator==(const MetricsRow&) const = default;
};

const std::vector<std::string>& metrics_columns();
std::string metrics_header();
std::string metrics_line(const MetricsRow& row);
MetricsRow parse_metrics_line(const std::string& line);

// Appends a row, writing the header first when the file is new or empty.
void append_metrics(const std::filesystem::path& path, const MetricsRow& row);
// Rows of a metrics file; a missing file has none.
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);
void write_metrics(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace tablutzero
