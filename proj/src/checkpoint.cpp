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

#include "tablutzero/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tablutzero/errors.hpp"

namespace tablutzero {
namespace {

using nlohmann::json;

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_tensors(std::string& out, const Params<float>& p) {
  for (const auto& t : p.tensors()) {
    for (float f : t.data) append_u32(out, std::bit_cast<std::uint32_t>(f));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string take(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void read_tensors(Params<float>& p) {
    for (auto& t : p.tensors())
      for (float& f : t.data) f = std::bit_cast<float>(u32());
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

json config_to_json(const NetConfig& c) {
  return json{{"blocks", c.blocks},
              {"filters", c.filters},
              {"input_planes", c.input_planes},
              {"policy_actions", c.policy_actions},
              {"value_hidden", c.value_hidden}};
}

json hyper_to_json(const OptimizerConfig& h) {
  return json{{"peak_lr", h.peak_lr},           {"min_lr", h.min_lr},
              {"warmup_steps", h.warmup_steps}, {"total_steps", h.total_steps},
              {"weight_decay", h.weight_decay}, {"beta1", h.beta1},
              {"beta2", h.beta2},               {"epsilon", h.epsilon}};
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  static_assert(sizeof(float) == 4);
  json header;
  header["format_version"] = kCheckpointFormatVersion;
  header["net_config"] = config_to_json(c.params.config());
  header["iteration"] = c.iteration;
  header["optimizer_step"] = c.optimizer_step();
  header["rng_seeds"] = c.rng_seeds;
  header["has_optimizer_state"] = c.optimizer.has_value();
  if (c.optimizer) header["optimizer"] = hyper_to_json(c.optimizer->hyper);
  json names = json::array();
  for (const auto& t : c.params.tensors()) names.push_back(t.name);
  header["tensors"] = std::move(names);

  const std::string text = header.dump();
  std::string out;
  out.reserve(4 + text.size() + c.params.parameter_count() * 4 * (c.optimizer ? 3 : 1));
  append_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  append_tensors(out, c.params);
  if (c.optimizer) {
    append_tensors(out, c.optimizer->first_moment);
    append_tensors(out, c.optimizer->second_moment);
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  const std::uint32_t header_len = r.u32();
  json header;
  try {
    header = json::parse(r.take(header_len));
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint header is not JSON: ") + e.what());
  }
  Checkpoint c;
  try {
    const int version = header.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
      throw CheckpointError("unsupported checkpoint format_version " + std::to_string(version));
    const json& nc = header.at("net_config");
    NetConfig cfg;
    cfg.blocks = nc.at("blocks").get<int>();
    cfg.filters = nc.at("filters").get<int>();
    cfg.input_planes = nc.at("input_planes").get<int>();
    cfg.policy_actions = nc.at("policy_actions").get<int>();
    cfg.value_hidden = nc.at("value_hidden").get<int>();
    try {
      cfg.validate();
    } catch (const ContractViolation& e) {
      throw CheckpointError(std::string("checkpoint net_config: ") + e.what());
    }
    c.iteration = header.at("iteration").get<int>();
    c.rng_seeds = header.at("rng_seeds").get<std::map<std::string, std::uint64_t>>();
    c.params = Params<float>(cfg);
    const json& names = header.at("tensors");
    if (names.size() != c.params.tensors().size())
      throw CheckpointError("checkpoint tensor list does not match net_config");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].get<std::string>() != c.params.tensors()[i].name)
        throw CheckpointError("checkpoint tensor order mismatch at " + names[i].get<std::string>());
    }
    r.read_tensors(c.params);
    if (header.at("has_optimizer_state").get<bool>()) {
      const json& h = header.at("optimizer");
      OptimizerConfig hyper;
      hyper.peak_lr = h.at("peak_lr").get<double>();
      hyper.min_lr = h.at("min_lr").get<double>();
      hyper.warmup_steps = h.at("warmup_steps").get<std::int64_t>();
      hyper.total_steps = h.at("total_steps").get<std::int64_t>();
      hyper.weight_decay = h.at("weight_decay").get<double>();
      hyper.beta1 = h.at("beta1").get<double>();
      hyper.beta2 = h.at("beta2").get<double>();
      hyper.epsilon = h.at("epsilon").get<double>();
      OptState<float> o = OptState<float>::init(c.params, hyper);
      o.step = header.at("optimizer_step").get<std::int64_t>();
      r.read_tensors(o.first_moment);
      r.read_tensors(o.second_moment);
      c.optimizer = std::move(o);
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header: ") + e.what());
  }
  if (!r.at_end()) throw CheckpointError("checkpoint has trailing bytes");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  const std::string bytes = serialize_checkpoint(c);
  // Write-then-rename so a killed run never leaves a half-written checkpoint.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_checkpoint(ss.str());
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace tablutzero
