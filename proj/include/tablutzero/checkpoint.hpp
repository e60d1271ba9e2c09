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

// Checkpoint archive:
//
//   u32 little-endian   header length in bytes
//   header              UTF-8 JSON: format_version, net_config, iteration,
//                       optimizer_step, rng_seeds, has_optimizer_state,
//                       optimizer (hyperparameters), tensors (names)
//   payload             little-endian float32 tensors in parameter_layout()
//                       order; when has_optimizer_state, followed by all
//                       first moments and then all second moments in the same
//                       order
//
// Loading and saving again reproduces the file byte for byte.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "tablutzero/network.hpp"
#include "tablutzero/optimizer.hpp"

namespace tablutzero {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  int iteration = 0;
  std::map<std::string, std::uint64_t> rng_seeds;
  Params<float> params;
  std::optional<OptState<float>> optimizer;

  std::int64_t optimizer_step() const { return optimizer ? optimizer->step : 0; }
};

std::string serialize_checkpoint(const Checkpoint& c);
// Throws CheckpointError on truncated, corrupt or incompatible data.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tablutzero
