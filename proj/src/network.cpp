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

#include "tablutzero/network.hpp"

#include <type_traits>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tablutzero/errors.hpp"

namespace tablutzero {
namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const Mat<T>>;

constexpr int kSquares = kNumSquares;
// Large negative stand-in for -inf on masked logits.
template <typename T>
constexpr T kMaskedLogit = static_cast<T>(-1e30);

// Index of every tensor in the canonical layout.
struct HeadIndex {
  int policy_conv, policy_gain, policy_bias;
  int value_conv, value_gain, value_bias;
  int fc1_w, fc1_b, fc2_w, fc2_b;
};

struct BlockIndex {
  int conv1, gain1, bias1, conv2, gain2, bias2;
};

struct LayoutIndex {
  int stem_conv, stem_gain, stem_bias;
  std::vector<BlockIndex> blocks;
  std::array<HeadIndex, 2> heads;
};

LayoutIndex layout_index(const NetConfig& cfg) {
  LayoutIndex li;
  int i = 0;
  li.stem_conv = i++;
  li.stem_gain = i++;
  li.stem_bias = i++;
  for (int b = 0; b < cfg.blocks; ++b) {
    BlockIndex bi;
    bi.conv1 = i++;
    bi.gain1 = i++;
    bi.bias1 = i++;
    bi.conv2 = i++;
    bi.gain2 = i++;
    bi.bias2 = i++;
    li.blocks.push_back(bi);
  }
  for (int s = 0; s < 2; ++s) {
    HeadIndex h;
    h.policy_conv = i++;
    h.policy_gain = i++;
    h.policy_bias = i++;
    h.value_conv = i++;
    h.value_gain = i++;
    h.value_bias = i++;
    h.fc1_w = i++;
    h.fc1_b = i++;
    h.fc2_w = i++;
    h.fc2_b = i++;
    li.heads[s] = h;
  }
  return li;
}

// ---- layer primitives on row-major [rows, channels] activations ----------

// col[(n*81 + p), k*cin + ci] = in[(n*81 + neighbour_k(p)), ci], zero padded.
template <typename T>
void im2col3x3(const T* in, int n_batch, int cin, T* col) {
  const int width = 9 * cin;
  for (int n = 0; n < n_batch; ++n) {
    for (int r = 0; r < kBoardSize; ++r) {
      for (int c = 0; c < kBoardSize; ++c) {
        T* dst = col + static_cast<std::size_t>(n * kSquares + r * kBoardSize + c) * width;
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            T* out = dst + (ky * 3 + kx) * cin;
            const int rr = r + ky - 1;
            const int cc = c + kx - 1;
            if (on_board(rr, cc)) {
              const T* src = in + static_cast<std::size_t>(n * kSquares + rr * kBoardSize + cc) * cin;
              std::copy_n(src, cin, out);
            } else {
              std::fill_n(out, cin, T{0});
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col3x3: accumulates into din (which must start zeroed).
template <typename T>
void col2im3x3(const T* col, int n_batch, int cin, T* din) {
  const int width = 9 * cin;
  for (int n = 0; n < n_batch; ++n) {
    for (int r = 0; r < kBoardSize; ++r) {
      for (int c = 0; c < kBoardSize; ++c) {
        const T* src = col + static_cast<std::size_t>(n * kSquares + r * kBoardSize + c) * width;
        for (int ky = 0; ky < 3; ++ky) {
          for (int kx = 0; kx < 3; ++kx) {
            const int rr = r + ky - 1;
            const int cc = c + kx - 1;
            if (!on_board(rr, cc)) continue;
            T* dst = din + static_cast<std::size_t>(n * kSquares + rr * kBoardSize + cc) * cin;
            const T* g = src + (ky * 3 + kx) * cin;
            for (int ci = 0; ci < cin; ++ci) dst[ci] += g[ci];
          }
        }
      }
    }
  }
}

template <typename T>
void conv3x3_forward(const std::vector<T>& in, int n_batch, int cin, const Tensor<T>& w, int cout,
                     std::vector<T>& out, std::vector<T>& scratch) {
  const int rows = n_batch * kSquares;
  scratch.resize(static_cast<std::size_t>(rows) * 9 * cin);
  im2col3x3(in.data(), n_batch, cin, scratch.data());
  out.resize(static_cast<std::size_t>(rows) * cout);
  ConstMapMat<T> col(scratch.data(), rows, 9 * cin);
  ConstMapMat<T> wm(w.data.data(), 9 * cin, cout);
  MapMat<T> om(out.data(), rows, cout);
  om.noalias() = col * wm;
}

// dW += col(in)^T dout; din = col2im(dout W^T) when din is non-null.
template <typename T>
void conv3x3_backward(const std::vector<T>& in, int n_batch, int cin, const Tensor<T>& w, int cout,
                      const std::vector<T>& dout, Tensor<T>& dw, std::vector<T>* din,
                      std::vector<T>& scratch) {
  const int rows = n_batch * kSquares;
  scratch.resize(static_cast<std::size_t>(rows) * 9 * cin);
  im2col3x3(in.data(), n_batch, cin, scratch.data());
  ConstMapMat<T> col(scratch.data(), rows, 9 * cin);
  ConstMapMat<T> dom(dout.data(), rows, cout);
  MapMat<T> dwm(dw.data.data(), 9 * cin, cout);
  dwm.noalias() += col.transpose() * dom;
  if (din != nullptr) {
    ConstMapMat<T> wm(w.data.data(), 9 * cin, cout);
    MapMat<T> dcol(scratch.data(), rows, 9 * cin);
    dcol.noalias() = dom * wm.transpose();
    din->assign(static_cast<std::size_t>(rows) * cin, T{0});
    col2im3x3(scratch.data(), n_batch, cin, din->data());
  }
}

template <typename T>
void dense_forward(const std::vector<T>& in, int rows, int cin, const Tensor<T>& w,
                   const Tensor<T>* bias, int cout, std::vector<T>& out) {
  out.resize(static_cast<std::size_t>(rows) * cout);
  ConstMapMat<T> im(in.data(), rows, cin);
  ConstMapMat<T> wm(w.data.data(), cin, cout);
  MapMat<T> om(out.data(), rows, cout);
  om.noalias() = im * wm;
  if (bias != nullptr) {
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bm(bias->data.data(), cout);
    om.rowwise() += bm;
  }
}

template <typename T>
void dense_backward(const std::vector<T>& in, int rows, int cin, const Tensor<T>& w, int cout,
                    const std::vector<T>& dout, Tensor<T>& dw, std::type_identity_t<Tensor<T>>* db,
                    std::vector<T>* din) {
  ConstMapMat<T> im(in.data(), rows, cin);
  ConstMapMat<T> dom(dout.data(), rows, cout);
  MapMat<T> dwm(dw.data.data(), cin, cout);
  dwm.noalias() += im.transpose() * dom;
  if (db != nullptr) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cout; ++c) db->data[c] += dout[static_cast<std::size_t>(r) * cout + c];
  }
  if (din != nullptr) {
    din->resize(static_cast<std::size_t>(rows) * cin);
    ConstMapMat<T> wm(w.data.data(), cin, cout);
    MapMat<T> dim(din->data(), rows, cin);
    dim.noalias() = dom * wm.transpose();
  }
}

// Fixed summation order, independent of buffer alignment.
template <typename T>
void column_means(const T* x, int channels, T* out) {
  std::fill_n(out, channels, T{0});
  for (int r = 0; r < kSquares; ++r)
    for (int c = 0; c < channels; ++c) out[c] += x[r * channels + c];
  for (int c = 0; c < channels; ++c) out[c] /= static_cast<T>(kSquares);
}

template <typename T>
struct NormCache {
  std::vector<T> xhat;     // [n*81, c]
  std::vector<T> inv_std;  // [n, c]
};

// y = gain * (x - mean) / sqrt(var + eps) + bias, statistics over squares.
template <typename T>
void norm_forward(std::vector<T>& x, int n_batch, int channels, const Tensor<T>& gain,
                  const Tensor<T>& bias, NormCache<T>* cache) {
  if (cache != nullptr) {
    cache->xhat.resize(x.size());
    cache->inv_std.resize(static_cast<std::size_t>(n_batch) * channels);
  }
  std::vector<T> mean(channels), var(channels), inv(channels);
  for (int n = 0; n < n_batch; ++n) {
    T* blk = x.data() + static_cast<std::size_t>(n) * kSquares * channels;
    column_means(blk, channels, mean.data());
    for (int r = 0; r < kSquares; ++r)
      for (int c = 0; c < channels; ++c) blk[r * channels + c] -= mean[c];
    std::fill(var.begin(), var.end(), T{0});
    for (int r = 0; r < kSquares; ++r)
      for (int c = 0; c < channels; ++c) var[c] += blk[r * channels + c] * blk[r * channels + c];
    for (int c = 0; c < channels; ++c)
      inv[c] = T{1} / std::sqrt(var[c] / static_cast<T>(kSquares) + static_cast<T>(kNormEpsilon));
    for (int r = 0; r < kSquares; ++r)
      for (int c = 0; c < channels; ++c) blk[r * channels + c] *= inv[c];
    if (cache != nullptr) {
      std::copy_n(blk, kSquares * channels,
                  cache->xhat.data() + static_cast<std::size_t>(n) * kSquares * channels);
      std::copy_n(inv.data(), channels, cache->inv_std.data() + static_cast<std::size_t>(n) * channels);
    }
    for (int r = 0; r < kSquares; ++r)
      for (int c = 0; c < channels; ++c)
        blk[r * channels + c] = blk[r * channels + c] * gain.data[c] + bias.data[c];
  }
}

// In place: dy becomes dx. Accumulates gain/bias gradients.
template <typename T>
void norm_backward(std::vector<T>& dy, int n_batch, int channels, const Tensor<T>& gain,
                   const NormCache<T>& cache, Tensor<T>& dgain, Tensor<T>& dbias) {
  std::vector<T> mean_d(channels), mean_dx(channels);
  for (int n = 0; n < n_batch; ++n) {
    const std::size_t off = static_cast<std::size_t>(n) * kSquares * channels;
    T* d = dy.data() + off;
    const T* xh = cache.xhat.data() + off;
    const T* inv = cache.inv_std.data() + static_cast<std::size_t>(n) * channels;
    std::fill(mean_d.begin(), mean_d.end(), T{0});
    std::fill(mean_dx.begin(), mean_dx.end(), T{0});
    for (int r = 0; r < kSquares; ++r) {
      for (int c = 0; c < channels; ++c) {
        const T v = d[r * channels + c];
        dgain.data[c] += v * xh[r * channels + c];
        dbias.data[c] += v;
        const T dxhat = v * gain.data[c];
        d[r * channels + c] = dxhat;
        mean_d[c] += dxhat;
        mean_dx[c] += dxhat * xh[r * channels + c];
      }
    }
    for (int c = 0; c < channels; ++c) {
      mean_d[c] /= static_cast<T>(kSquares);
      mean_dx[c] /= static_cast<T>(kSquares);
    }
    for (int r = 0; r < kSquares; ++r)
      for (int c = 0; c < channels; ++c) {
        T& v = d[r * channels + c];
        v = (v - mean_d[c] - xh[r * channels + c] * mean_dx[c]) * inv[c];
      }
  }
}

template <typename T>
void relu_inplace(std::vector<T>& x) {
  for (T& v : x) v = v > T{0} ? v : T{0};
}

// dy *= (y > 0)
template <typename T>
void relu_backward(std::vector<T>& dy, const std::vector<T>& y) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    if (!(y[i] > T{0})) dy[i] = T{0};
}

template <typename T>
struct BlockCache {
  std::vector<T> in;      // block input h
  std::vector<T> mid;     // relu(norm1(conv1(h)))
  std::vector<T> out;     // relu(norm2(conv2(mid)) + h)
  NormCache<T> norm1, norm2;
};

template <typename T>
struct HeadCache {
  std::vector<T> logits;  // [n*81, 32] == [n, 2592]
  NormCache<T> policy_norm;
  std::vector<T> value_plane;  // relu(norm(conv)) as [n, 81]
  NormCache<T> value_norm;
  std::vector<T> hidden;  // [n, H] after relu
  std::vector<T> value;   // [n] after tanh
};

template <typename T>
struct ForwardCache {
  int batch = 0;
  std::vector<T> stem_out;
  NormCache<T> stem_norm;
  std::vector<BlockCache<T>> blocks;
  std::array<HeadCache<T>, 2> heads;
};

template <typename T>
void head_forward(const Params<T>& p, const HeadIndex& hi, const std::vector<T>& trunk,
                  int n_batch, HeadCache<T>& hc, bool keep_cache) {
  const auto& t = p.tensors();
  const NetConfig& cfg = p.config();
  const int rows = n_batch * kSquares;
  dense_forward<T>(trunk, rows, cfg.filters, t[hi.policy_conv], nullptr, kPolicyChannels, hc.logits);
  norm_forward(hc.logits, n_batch, kPolicyChannels, t[hi.policy_gain], t[hi.policy_bias],
               keep_cache ? &hc.policy_norm : nullptr);

  dense_forward<T>(trunk, rows, cfg.filters, t[hi.value_conv], nullptr, 1, hc.value_plane);
  norm_forward(hc.value_plane, n_batch, 1, t[hi.value_gain], t[hi.value_bias],
               keep_cache ? &hc.value_norm : nullptr);
  relu_inplace(hc.value_plane);
  dense_forward<T>(hc.value_plane, n_batch, kSquares, t[hi.fc1_w], &t[hi.fc1_b], cfg.value_hidden,
                   hc.hidden);
  relu_inplace(hc.hidden);
  dense_forward<T>(hc.hidden, n_batch, cfg.value_hidden, t[hi.fc2_w], &t[hi.fc2_b], 1, hc.value);
  for (T& v : hc.value) v = std::tanh(v);
}

template <typename T>
void check_input(const Params<T>& p, std::span<const T> inputs, int batch) {
  const NetConfig& cfg = p.config();
  if (p.tensors().empty()) throw ContractViolation("forward on empty parameters");
  if (batch < 0 || inputs.size() != static_cast<std::size_t>(batch) * kSquares * cfg.input_planes)
    throw ContractViolation("input shape does not match batch x 9 x 9 x input_planes");
}

template <typename T>
void run_forward(const Params<T>& p, std::span<const T> inputs, int batch, ForwardCache<T>& fc,
                 bool keep_cache) {
  const auto& t = p.tensors();
  const NetConfig& cfg = p.config();
  const LayoutIndex li = layout_index(cfg);
  fc.batch = batch;
  std::vector<T> scratch;
  std::vector<T> x(inputs.begin(), inputs.end());

  conv3x3_forward(x, batch, cfg.input_planes, t[li.stem_conv], cfg.filters, fc.stem_out, scratch);
  norm_forward(fc.stem_out, batch, cfg.filters, t[li.stem_gain], t[li.stem_bias],
               keep_cache ? &fc.stem_norm : nullptr);
  relu_inplace(fc.stem_out);

  fc.blocks.resize(keep_cache ? cfg.blocks : 1);
  const std::vector<T>* h = &fc.stem_out;
  std::vector<T> mid, out;
  for (int b = 0; b < cfg.blocks; ++b) {
    const BlockIndex& bi = li.blocks[b];
    BlockCache<T>& bc = fc.blocks[keep_cache ? b : 0];
    NormCache<T>* n1 = keep_cache ? &bc.norm1 : nullptr;
    NormCache<T>* n2 = keep_cache ? &bc.norm2 : nullptr;
    conv3x3_forward(*h, batch, cfg.filters, t[bi.conv1], cfg.filters, mid, scratch);
    norm_forward(mid, batch, cfg.filters, t[bi.gain1], t[bi.bias1], n1);
    relu_inplace(mid);
    conv3x3_forward(mid, batch, cfg.filters, t[bi.conv2], cfg.filters, out, scratch);
    norm_forward(out, batch, cfg.filters, t[bi.gain2], t[bi.bias2], n2);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const T v = out[i] + (*h)[i];
      out[i] = v > T{0} ? v : T{0};
    }
    if (keep_cache) {
      bc.in = *h;
      bc.mid = mid;
      bc.out = out;
      h = &bc.out;
    } else {
      bc.out.swap(out);
      h = &bc.out;
    }
  }
  for (int s = 0; s < 2; ++s) head_forward(p, li.heads[s], *h, batch, fc.heads[s], keep_cache);
}

template <typename T>
const std::vector<T>& trunk_output(const ForwardCache<T>& fc) {
  return fc.blocks.empty() ? fc.stem_out : fc.blocks.back().out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------

void NetConfig::validate() const {
  if (blocks < 1) throw ContractViolation("blocks must be >= 1");
  if (filters < 1) throw ContractViolation("filters must be >= 1");
  if (value_hidden < 1) throw ContractViolation("value_hidden must be >= 1");
  if (input_planes != kNumPlanes) throw ContractViolation("input_planes must be 43");
  if (policy_actions != kNumActions) throw ContractViolation("policy_actions must be 2592");
}

std::vector<TensorSpec> parameter_layout(const NetConfig& cfg) {
  cfg.validate();
  const int f = cfg.filters;
  std::vector<TensorSpec> specs;
  auto norm = [&](const std::string& prefix, int ch) {
    specs.push_back({prefix + ".gain", {ch}, false});
    specs.push_back({prefix + ".bias", {ch}, false});
  };
  specs.push_back({"stem.conv.weight", {3, 3, cfg.input_planes, f}, true});
  norm("stem.norm", f);
  for (int b = 0; b < cfg.blocks; ++b) {
    const std::string pre = "block" + std::to_string(b);
    specs.push_back({pre + ".conv1.weight", {3, 3, f, f}, true});
    norm(pre + ".norm1", f);
    specs.push_back({pre + ".conv2.weight", {3, 3, f, f}, true});
    norm(pre + ".norm2", f);
  }
  for (const char* side : {"attacker", "defender"}) {
    const std::string pol = std::string("policy_") + side;
    const std::string val = std::string("value_") + side;
    specs.push_back({pol + ".conv.weight", {f, kPolicyChannels}, true});
    norm(pol + ".norm", kPolicyChannels);
    specs.push_back({val + ".conv.weight", {f, 1}, true});
    norm(val + ".norm", 1);
    specs.push_back({val + ".fc1.weight", {kNumSquares, cfg.value_hidden}, true});
    specs.push_back({val + ".fc1.bias", {cfg.value_hidden}, false});
    specs.push_back({val + ".fc2.weight", {cfg.value_hidden, 1}, true});
    specs.push_back({val + ".fc2.bias", {1}, false});
  }
  return specs;
}

std::size_t parameter_count(const NetConfig& cfg) {
  std::size_t n = 0;
  for (const auto& s : parameter_layout(cfg)) {
    std::size_t size = 1;
    for (int d : s.shape) size *= static_cast<std::size_t>(d);
    n += size;
  }
  return n;
}

template <typename T>
Params<T>::Params(const NetConfig& cfg) : cfg_(cfg) {
  for (auto& spec : parameter_layout(cfg)) {
    std::size_t size = 1;
    for (int d : spec.shape) size *= static_cast<std::size_t>(d);
    tensors_.push_back(Tensor<T>{std::move(spec.name), std::move(spec.shape),
                                 std::vector<T>(size, T{0}), spec.decay});
  }
}

template <typename T>
Tensor<T>& Params<T>::get(std::string_view name) {
  for (auto& t : tensors_)
    if (t.name == name) return t;
  throw ContractViolation("no tensor named " + std::string(name));
}

template <typename T>
const Tensor<T>& Params<T>::get(std::string_view name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return t;
  throw ContractViolation("no tensor named " + std::string(name));
}

template <typename T>
std::size_t Params<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.data.size();
  return n;
}

template <typename T>
Params<T> init_params(const NetConfig& cfg, std::uint64_t seed) {
  Params<T> p(cfg);
  for (std::size_t i = 0; i < p.tensors().size(); ++i) {
    Tensor<T>& t = p.tensors()[i];
    const std::string& name = t.name;
    if (name.ends_with(".gain")) {
      std::fill(t.data.begin(), t.data.end(), T{1});
    } else if (name.ends_with(".weight")) {
      // Fan-in is everything except the output dimension.
      int fan_in = 1;
      for (std::size_t d = 0; d + 1 < t.shape.size(); ++d) fan_in *= t.shape[d];
      std::mt19937_64 rng(mix_seed(seed, i));
      std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
      for (T& v : t.data) v = static_cast<T>(normal(rng));
    }
  }
  return p;
}

template <typename T>
NetOutput<T> BatchOutput<T>::row(int b) const {
  NetOutput<T> o;
  const auto begin = static_cast<std::size_t>(b) * kNumActions;
  o.logits_attacker.assign(logits[0].begin() + begin, logits[0].begin() + begin + kNumActions);
  o.logits_defender.assign(logits[1].begin() + begin, logits[1].begin() + begin + kNumActions);
  o.value_attacker = values[0][b];
  o.value_defender = values[1][b];
  return o;
}

template <typename T>
HeadOutput<T> BatchOutput<T>::head(int b, Side side) const {
  const int s = static_cast<int>(side);
  return {std::span<const T>(logits[s]).subspan(static_cast<std::size_t>(b) * kNumActions, kNumActions),
          values[s][b]};
}

template <typename T>
BatchOutput<T> forward(const Params<T>& p, std::span<const T> inputs, int batch) {
  check_input(p, inputs, batch);
  BatchOutput<T> out;
  out.batch = batch;
  for (int s = 0; s < 2; ++s) {
    out.logits[s].resize(static_cast<std::size_t>(batch) * kNumActions);
    out.values[s].resize(batch);
  }
  // Chunked to bound the im2col scratch.
  constexpr int kChunk = 128;
  const std::size_t stride = static_cast<std::size_t>(kPlaneStackSize);
  ForwardCache<T> fc;
  for (int start = 0; start < batch; start += kChunk) {
    const int n = std::min(kChunk, batch - start);
    run_forward(p, inputs.subspan(start * stride, n * stride), n, fc, false);
    for (int s = 0; s < 2; ++s) {
      std::copy(fc.heads[s].logits.begin(), fc.heads[s].logits.end(),
                out.logits[s].begin() + static_cast<std::size_t>(start) * kNumActions);
      std::copy(fc.heads[s].value.begin(), fc.heads[s].value.end(), out.values[s].begin() + start);
    }
  }
  return out;
}

template <typename T>
std::vector<NetOutput<T>> forward(const Params<T>& p, std::span<const PlaneStack> inputs) {
  std::vector<T> flat;
  flat.reserve(inputs.size() * kPlaneStackSize);
  for (const auto& ps : inputs)
    for (float v : ps.data) flat.push_back(static_cast<T>(v));
  const auto out = forward<T>(p, flat, static_cast<int>(inputs.size()));
  std::vector<NetOutput<T>> rows;
  for (int b = 0; b < out.batch; ++b) rows.push_back(out.row(b));
  return rows;
}

template <typename T>
void TrainBatch<T>::validate() const {
  const auto n = static_cast<std::size_t>(batch);
  if (batch <= 0) throw ContractViolation("empty training batch");
  if (inputs.size() != n * kPlaneStackSize || policy_targets.size() != n * kNumActions ||
      value_targets.size() != n || side_to_move.size() != n || legal_masks.size() != n * kNumActions)
    throw ContractViolation("training batch arrays have inconsistent sizes");
  for (std::size_t b = 0; b < n; ++b) {
    double sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      const T t = policy_targets[b * kNumActions + a];
      if (t < T{0}) throw ContractViolation("negative policy target");
      if (t != T{0} && legal_masks[b * kNumActions + a] == 0)
        throw ContractViolation("policy target mass on an illegal action");
      sum += static_cast<double>(t);
    }
    if (std::abs(sum - 1.0) > 1e-3) throw ContractViolation("policy target does not sum to 1");
  }
}

template <typename T>
std::vector<T> masked_softmax(std::span<const T> logits, std::span<const std::uint8_t> mask) {
  if (logits.size() != mask.size()) throw ContractViolation("logits and mask sizes differ");
  std::vector<T> p(logits.size(), T{0});
  T max_logit = -std::numeric_limits<T>::infinity();
  for (std::size_t a = 0; a < logits.size(); ++a)
    if (mask[a]) max_logit = std::max(max_logit, logits[a]);
  if (!std::isfinite(max_logit)) return p;
  T z = 0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    if (!mask[a]) continue;
    p[a] = std::exp(logits[a] - max_logit);
    z += p[a];
  }
  for (T& v : p) v /= z;
  return p;
}

namespace {

// Per-sample loss pieces and the gradients with respect to the selected
// head's logits and pre-tanh value.
template <typename T>
LossTerms loss_terms(const ForwardCache<T>& fc, const TrainBatch<T>& b,
                     std::array<std::vector<T>, 2>* dlogits,
                     std::array<std::vector<T>, 2>* dvalue_pre) {
  const int n = b.batch;
  if (dlogits != nullptr) {
    for (int s = 0; s < 2; ++s) {
      (*dlogits)[s].assign(static_cast<std::size_t>(n) * kNumActions, T{0});
      (*dvalue_pre)[s].assign(n, T{0});
    }
  }
  double ce_sum = 0.0, mse_sum = 0.0, ent_sum = 0.0;
  std::vector<double> probs(kNumActions);
  for (int i = 0; i < n; ++i) {
    const int s = static_cast<int>(b.side_to_move[i]);
    const T* logits = fc.heads[s].logits.data() + static_cast<std::size_t>(i) * kNumActions;
    const std::uint8_t* mask = b.legal_masks.data() + static_cast<std::size_t>(i) * kNumActions;
    const T* target = b.policy_targets.data() + static_cast<std::size_t>(i) * kNumActions;
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a)
      if (mask[a]) max_logit = std::max(max_logit, static_cast<double>(logits[a]));
    double z = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      probs[a] = mask[a] ? std::exp(static_cast<double>(logits[a]) - max_logit) : 0.0;
      z += probs[a];
    }
    const double log_z = std::log(z) + max_logit;
    double ce = 0.0, ent = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      if (!mask[a]) continue;
      probs[a] /= z;
      const double logp = static_cast<double>(logits[a]) - log_z;
      if (target[a] != T{0}) ce -= static_cast<double>(target[a]) * logp;
      if (probs[a] > 0.0) ent -= probs[a] * logp;
    }
    ce_sum += ce;
    ent_sum += ent;
    const double v = static_cast<double>(fc.heads[s].value[i]);
    const double diff = v - static_cast<double>(b.value_targets[i]);
    mse_sum += diff * diff;
    if (dlogits != nullptr) {
      T* dl = (*dlogits)[s].data() + static_cast<std::size_t>(i) * kNumActions;
      for (int a = 0; a < kNumActions; ++a) {
        if (mask[a]) dl[a] = static_cast<T>((probs[a] - static_cast<double>(target[a])) / n);
      }
      (*dvalue_pre)[s][i] = static_cast<T>(2.0 * diff / n * (1.0 - v * v));
    }
  }
  LossTerms terms;
  terms.policy_ce = ce_sum / n;
  terms.value_mse = mse_sum / n;
  terms.entropy = ent_sum / n;
  terms.total = terms.policy_ce + terms.value_mse;
  return terms;
}

}  // namespace

template <typename T>
LossTerms loss(const Params<T>& p, const TrainBatch<T>& b) {
  b.validate();
  check_input(p, std::span<const T>(b.inputs), b.batch);
  ForwardCache<T> fc;
  run_forward(p, std::span<const T>(b.inputs), b.batch, fc, true);
  return loss_terms<T>(fc, b, nullptr, nullptr);
}

template <typename T>
LossAndGradients<T> loss_and_gradients(const Params<T>& p, const TrainBatch<T>& b) {
  b.validate();
  check_input(p, std::span<const T>(b.inputs), b.batch);
  const NetConfig& cfg = p.config();
  const LayoutIndex li = layout_index(cfg);
  const auto& t = p.tensors();
  const int n = b.batch;
  const int rows = n * kSquares;

  ForwardCache<T> fc;
  run_forward(p, std::span<const T>(b.inputs), n, fc, true);
  std::array<std::vector<T>, 2> dlogits, dvalue_pre;
  LossAndGradients<T> out{loss_terms<T>(fc, b, &dlogits, &dvalue_pre), Params<T>(cfg)};
  auto& g = out.grads.tensors();

  const std::vector<T>& trunk = trunk_output(fc);
  std::vector<T> dtrunk(trunk.size(), T{0});
  std::vector<T> tmp, tmp2, scratch;

  for (int s = 0; s < 2; ++s) {
    const HeadIndex& hi = li.heads[s];
    const HeadCache<T>& hc = fc.heads[s];
    bool any = false;
    for (Side side : b.side_to_move) any = any || static_cast<int>(side) == s;
    if (!any) continue;

    // Policy head.
    tmp = dlogits[s];
    norm_backward(tmp, n, kPolicyChannels, t[hi.policy_gain], hc.policy_norm, g[hi.policy_gain],
                  g[hi.policy_bias]);
    dense_backward(trunk, rows, cfg.filters, t[hi.policy_conv], kPolicyChannels, tmp,
                   g[hi.policy_conv], nullptr, &tmp2);
    for (std::size_t i = 0; i < dtrunk.size(); ++i) dtrunk[i] += tmp2[i];

    // Value head.
    dense_backward(hc.hidden, n, cfg.value_hidden, t[hi.fc2_w], 1, dvalue_pre[s], g[hi.fc2_w],
                   &g[hi.fc2_b], &tmp);
    relu_backward(tmp, hc.hidden);
    dense_backward(hc.value_plane, n, kSquares, t[hi.fc1_w], cfg.value_hidden, tmp, g[hi.fc1_w],
                   &g[hi.fc1_b], &tmp2);
    relu_backward(tmp2, hc.value_plane);
    norm_backward(tmp2, n, 1, t[hi.value_gain], hc.value_norm, g[hi.value_gain], g[hi.value_bias]);
    dense_backward(trunk, rows, cfg.filters, t[hi.value_conv], 1, tmp2, g[hi.value_conv], nullptr,
                   &tmp);
    for (std::size_t i = 0; i < dtrunk.size(); ++i) dtrunk[i] += tmp[i];
  }

  std::vector<T> dh = std::move(dtrunk);
  for (int blk = cfg.blocks - 1; blk >= 0; --blk) {
    const BlockIndex& bi = li.blocks[blk];
    const BlockCache<T>& bc = fc.blocks[blk];
    relu_backward(dh, bc.out);  // dh is now d(sum); it flows to conv2 branch and skip
    std::vector<T> dbranch = dh;
    norm_backward(dbranch, n, cfg.filters, t[bi.gain2], bc.norm2, g[bi.gain2], g[bi.bias2]);
    conv3x3_backward(bc.mid, n, cfg.filters, t[bi.conv2], cfg.filters, dbranch, g[bi.conv2], &tmp,
                     scratch);
    relu_backward(tmp, bc.mid);
    norm_backward(tmp, n, cfg.filters, t[bi.gain1], bc.norm1, g[bi.gain1], g[bi.bias1]);
    conv3x3_backward(bc.in, n, cfg.filters, t[bi.conv1], cfg.filters, tmp, g[bi.conv1], &tmp2,
                     scratch);
    for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += tmp2[i];
  }

  relu_backward(dh, fc.stem_out);
  norm_backward(dh, n, cfg.filters, t[li.stem_gain], fc.stem_norm, g[li.stem_gain], g[li.stem_bias]);
  std::vector<T> x(b.inputs.begin(), b.inputs.end());
  conv3x3_backward<T>(x, n, cfg.input_planes, t[li.stem_conv], cfg.filters, dh, g[li.stem_conv],
                      nullptr, scratch);
  return out;
}

template <typename T>
std::vector<std::uint8_t> activation_pattern(const Params<T>& p, std::span<const T> inputs,
                                             int batch) {
  check_input(p, inputs, batch);
  ForwardCache<T> fc;
  run_forward(p, inputs, batch, fc, true);
  std::vector<std::uint8_t> pattern;
  const auto add = [&](const std::vector<T>& y) {
    for (T v : y) pattern.push_back(v > T{0});
  };
  add(fc.stem_out);
  for (const auto& bc : fc.blocks) {
    add(bc.mid);
    add(bc.out);
  }
  for (const auto& hc : fc.heads) {
    add(hc.value_plane);
    add(hc.hidden);
  }
  return pattern;
}

#define TABLUTZERO_INSTANTIATE(T)                                                              \
  template class Params<T>;                                                                    \
  template Params<T> init_params<T>(const NetConfig&, std::uint64_t);                          \
  template struct BatchOutput<T>;                                                              \
  template BatchOutput<T> forward<T>(const Params<T>&, std::span<const T>, int);               \
  template std::vector<NetOutput<T>> forward<T>(const Params<T>&, std::span<const PlaneStack>); \
  template struct TrainBatch<T>;                                                               \
  template LossTerms loss<T>(const Params<T>&, const TrainBatch<T>&);                          \
  template LossAndGradients<T> loss_and_gradients<T>(const Params<T>&, const TrainBatch<T>&);  \
  template std::vector<T> masked_softmax<T>(std::span<const T>, std::span<const std::uint8_t>); \
  template std::vector<std::uint8_t> activation_pattern<T>(const Params<T>&, std::span<const T>, int);

TABLUTZERO_INSTANTIATE(float)
TABLUTZERO_INSTANTIATE(double)

}  // namespace tablutzero
