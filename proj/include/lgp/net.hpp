#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "lgp/common.hpp"
#include "lgp/tensor.hpp"

namespace lgp {

// A named parameter tensor. Values are stored as 32-bit floats — the
// checkpoint format's unit — while all network math runs in double.
struct Array {
  std::string name;
  std::vector<int> dims;
  std::vector<float> v;

  static Array zeros(std::string name, std::vector<int> dims) {
    size_t n = 1;
    for (int d : dims) n *= static_cast<size_t>(d);
    return {std::move(name), std::move(dims), std::vector<float>(n, 0.0f)};
  }

  bool operator==(const Array&) const = default;
};

struct Parameters {
  std::vector<Array> arrays;

  Array& find(const std::string& name) {
    for (Array& a : arrays)
      if (a.name == name) return a;
    throw ContractError("no parameter array named " + name);
  }
  const Array& find(const std::string& name) const {
    return const_cast<Parameters*>(this)->find(name);
  }
  size_t total_values() const {
    size_t n = 0;
    for (const Array& a : arrays) n += a.v.size();
    return n;
  }
  bool operator==(const Parameters&) const = default;
};

struct NetworkConfig {
  int trunk_channels = 32;
  int residual_blocks = 4;
  int value_hidden = 32;  // kernel is fixed at 3x3
};

// Everything shape-determining: input channels, board plane, logit channels.
struct Net {
  NetworkConfig cfg;
  int C = 0, H = 0, W = 0, A = 0;
  Parameters params;
};

namespace detail {

// Portable uniform double in [0, 1) from a splitmix64 stream.
struct InitRng {
  uint64_t state;
  explicit InitRng(uint64_t seed) : state(seed) {}
  double next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  // Fan-in-scaled uniform: variance 1 / fan_in.
  float draw(int fan_in) {
    double limit = std::sqrt(3.0 / fan_in);
    return static_cast<float>((next() * 2.0 - 1.0) * limit);
  }
};

}  // namespace detail

inline Net init_network(const Codec& codec, const NetworkConfig& cfg, uint64_t seed) {
  Net net;
  net.cfg = cfg;
  net.C = codec.state.C;
  net.H = codec.grid.height;
  net.W = codec.grid.width;
  net.A = codec.move.A;
  int f = cfg.trunk_channels;

  detail::InitRng rng(seed);
  auto conv = [&](const std::string& name, int out, int in) {
    Array w = Array::zeros(name + ".weight", {out, in, 3, 3});
    for (float& x : w.v) x = rng.draw(in * 9);
    net.params.arrays.push_back(std::move(w));
    net.params.arrays.push_back(Array::zeros(name + ".bias", {out}));
  };
  auto norm = [&](const std::string& name, int n) {
    Array s = Array::zeros(name + ".scale", {n});
    for (float& x : s.v) x = 1.0f;
    net.params.arrays.push_back(std::move(s));
    net.params.arrays.push_back(Array::zeros(name + ".offset", {n}));
  };

  conv("conv0", f, net.C);
  norm("norm0", f);
  for (int b = 0; b < cfg.residual_blocks; ++b) {
    std::string p = "block" + std::to_string(b);
    conv(p + ".conv1", f, f);
    norm(p + ".norm1", f);
    conv(p + ".conv2", f, f);
    norm(p + ".norm2", f);
  }
  conv("policy", net.A, f);

  Array fc1 = Array::zeros("value.fc1.weight", {cfg.value_hidden, 2 * f});
  for (float& x : fc1.v) x = rng.draw(2 * f);
  net.params.arrays.push_back(std::move(fc1));
  net.params.arrays.push_back(Array::zeros("value.fc1.bias", {cfg.value_hidden}));
  // Zero final affine: the untrained value estimate is exactly 0.
  net.params.arrays.push_back(Array::zeros("value.fc2.weight", {1, cfg.value_hidden}));
  net.params.arrays.push_back(Array::zeros("value.fc2.bias", {1}));
  return net;
}

namespace detail {

using Plane = std::vector<double>;  // one or more channels, row-major

// Copies channels into a zero-padded (H+2)x(W+2) frame per channel.
inline void pad_into(const Plane& in, int channels, int h, int w, Plane& out) {
  int ph = h + 2, pw = w + 2;
  out.assign(static_cast<size_t>(channels) * ph * pw, 0.0);
  for (int c = 0; c < channels; ++c)
    for (int r = 0; r < h; ++r) {
      const double* src = in.data() + (static_cast<size_t>(c) * h + r) * w;
      double* dst = out.data() + (static_cast<size_t>(c) * ph + r + 1) * pw + 1;
      std::memcpy(dst, src, sizeof(double) * w);
    }
}

// Direct 3x3 same-convolution; the c-loop runs stride-1 on both sides.
inline void conv3x3_forward(const Plane& in, int cin, int h, int w, const Array& weight,
                            const Array& bias, Plane& padded, Plane& out) {
  int cout = weight.dims[0];
  pad_into(in, cin, h, w, padded);
  int pw = w + 2;
  out.assign(static_cast<size_t>(cout) * h * w, 0.0);
  for (int co = 0; co < cout; ++co) {
    double* o_base = out.data() + static_cast<size_t>(co) * h * w;
    for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) o_base[i] = bias.v[co];
    for (int ci = 0; ci < cin; ++ci) {
      const float* k = weight.v.data() + (static_cast<size_t>(co) * cin + ci) * 9;
      const double* p_base = padded.data() + static_cast<size_t>(ci) * (h + 2) * pw;
      for (int dr = 0; dr < 3; ++dr)
        for (int dc = 0; dc < 3; ++dc) {
          double kv = k[dr * 3 + dc];
          for (int r = 0; r < h; ++r) {
            const double* src = p_base + (r + dr) * pw + dc;
            double* dst = o_base + static_cast<size_t>(r) * w;
            for (int c = 0; c < w; ++c) dst[c] += kv * src[c];
          }
        }
    }
  }
}

// Gradients wrt input, weight, and bias. d_in is accumulated via a padded
// scratch then cropped; d_weight/d_bias accumulate in place.
inline void conv3x3_backward(const Plane& in_padded, int cin, int h, int w, const Array& weight,
                             const Plane& d_out, Plane& d_in_padded, Plane& d_in,
                             std::vector<double>& d_weight, std::vector<double>& d_bias) {
  int cout = weight.dims[0];
  int pw = w + 2, ph = h + 2;
  d_in_padded.assign(static_cast<size_t>(cin) * ph * pw, 0.0);
  for (int co = 0; co < cout; ++co) {
    const double* g_base = d_out.data() + static_cast<size_t>(co) * h * w;
    double bsum = 0;
    for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) bsum += g_base[i];
    d_bias[co] += bsum;
    for (int ci = 0; ci < cin; ++ci) {
      const float* k = weight.v.data() + (static_cast<size_t>(co) * cin + ci) * 9;
      double* dk = d_weight.data() + (static_cast<size_t>(co) * cin + ci) * 9;
      const double* p_base = in_padded.data() + static_cast<size_t>(ci) * ph * pw;
      double* dp_base = d_in_padded.data() + static_cast<size_t>(ci) * ph * pw;
      for (int dr = 0; dr < 3; ++dr)
        for (int dc = 0; dc < 3; ++dc) {
          double kv = k[dr * 3 + dc];
          double ksum = 0;
          for (int r = 0; r < h; ++r) {
            const double* src = p_base + (r + dr) * pw + dc;
            double* dpr = dp_base + (r + dr) * pw + dc;
            const double* g = g_base + static_cast<size_t>(r) * w;
            for (int c = 0; c < w; ++c) {
              ksum += src[c] * g[c];
              dpr[c] += kv * g[c];
            }
          }
          dk[dr * 3 + dc] += ksum;
        }
    }
  }
  d_in.assign(static_cast<size_t>(cin) * h * w, 0.0);
  for (int c = 0; c < cin; ++c)
    for (int r = 0; r < h; ++r) {
      const double* src = d_in_padded.data() + (static_cast<size_t>(c) * ph + r + 1) * pw + 1;
      double* dst = d_in.data() + (static_cast<size_t>(c) * h + r) * w;
      std::memcpy(dst, src, sizeof(double) * w);
    }
}

// Per-channel scale/offset with fixed identity statistics.
inline void norm_forward(const Plane& in, int channels, int plane, const Array& scale,
                         const Array& offset, Plane& out) {
  out.resize(in.size());
  for (int c = 0; c < channels; ++c) {
    double s = scale.v[c], o = offset.v[c];
    const double* src = in.data() + static_cast<size_t>(c) * plane;
    double* dst = out.data() + static_cast<size_t>(c) * plane;
    for (int i = 0; i < plane; ++i) dst[i] = s * src[i] + o;
  }
}

inline void norm_backward(const Plane& in, int channels, int plane, const Array& scale,
                          const Plane& d_out, Plane& d_in, std::vector<double>& d_scale,
                          std::vector<double>& d_offset) {
  d_in.resize(in.size());
  for (int c = 0; c < channels; ++c) {
    double s = scale.v[c], ds = 0, doff = 0;
    const double* x = in.data() + static_cast<size_t>(c) * plane;
    const double* g = d_out.data() + static_cast<size_t>(c) * plane;
    double* dx = d_in.data() + static_cast<size_t>(c) * plane;
    for (int i = 0; i < plane; ++i) {
      dx[i] = s * g[i];
      ds += x[i] * g[i];
      doff += g[i];
    }
    d_scale[c] += ds;
    d_offset[c] += doff;
  }
}

inline void relu_forward(const Plane& in, Plane& out) {
  out.resize(in.size());
  for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0 ? in[i] : 0.0;
}

inline void relu_backward(const Plane& in, const Plane& d_out, Plane& d_in) {
  d_in.resize(in.size());
  for (size_t i = 0; i < in.size(); ++i) d_in[i] = in[i] > 0 ? d_out[i] : 0.0;
}

}  // namespace detail

// Reusable buffers for one forward/backward pass. Callers that evaluate many
// states keep one workspace; everything inside is overwritten per call.
struct Workspace {
  using Plane = detail::Plane;
  Plane input;
  Plane conv0_out, norm0_out, relu0_out;
  struct Block {
    Plane conv1_out, norm1_out, relu1_out, conv2_out, norm2_out, sum_out, relu_out;
    Plane conv1_pad, conv2_pad;
  };
  std::vector<Block> blocks;
  Plane conv0_pad, policy_pad;
  Plane policy_out;                   // A x H x W logits
  std::vector<double> pooled;         // mean then max per trunk channel
  std::vector<int> max_index;         // argmax cell per trunk channel
  std::vector<double> fc1_out, fc1_relu;
  double value = 0.0;

  // Backward scratch.
  Plane d_tmp1, d_tmp2, d_tmp3, d_pad;
};

namespace detail {

inline const Plane& trunk_output(const Workspace& ws) {
  return ws.blocks.empty() ? ws.relu0_out : ws.blocks.back().relu_out;
}

}  // namespace detail

// Runs the full network: trunk, policy logits, and value. Logits for every
// position land in ws.policy_out; the value lands in ws.value.
inline void forward_raw(const Net& net, const StateTensor& x, Workspace& ws) {
  if (x.C != net.C || x.H != net.H || x.W != net.W)
    throw ContractError("forward: tensor shape mismatch");
  int h = net.H, w = net.W, f = net.cfg.trunk_channels, plane = h * w;

  ws.input.assign(x.data.begin(), x.data.end());
  const Parameters& p = net.params;
  detail::conv3x3_forward(ws.input, net.C, h, w, p.find("conv0.weight"), p.find("conv0.bias"),
                          ws.conv0_pad, ws.conv0_out);
  detail::norm_forward(ws.conv0_out, f, plane, p.find("norm0.scale"), p.find("norm0.offset"),
                       ws.norm0_out);
  detail::relu_forward(ws.norm0_out, ws.relu0_out);

  ws.blocks.resize(net.cfg.residual_blocks);
  const detail::Plane* prev = &ws.relu0_out;
  for (int b = 0; b < net.cfg.residual_blocks; ++b) {
    Workspace::Block& blk = ws.blocks[b];
    std::string pre = "block" + std::to_string(b);
    detail::conv3x3_forward(*prev, f, h, w, p.find(pre + ".conv1.weight"),
                            p.find(pre + ".conv1.bias"), blk.conv1_pad, blk.conv1_out);
    detail::norm_forward(blk.conv1_out, f, plane, p.find(pre + ".norm1.scale"),
                         p.find(pre + ".norm1.offset"), blk.norm1_out);
    detail::relu_forward(blk.norm1_out, blk.relu1_out);
    detail::conv3x3_forward(blk.relu1_out, f, h, w, p.find(pre + ".conv2.weight"),
                            p.find(pre + ".conv2.bias"), blk.conv2_pad, blk.conv2_out);
    detail::norm_forward(blk.conv2_out, f, plane, p.find(pre + ".norm2.scale"),
                         p.find(pre + ".norm2.offset"), blk.norm2_out);
    blk.sum_out.resize(blk.norm2_out.size());
    for (size_t i = 0; i < blk.sum_out.size(); ++i)
      blk.sum_out[i] = blk.norm2_out[i] + (*prev)[i];
    detail::relu_forward(blk.sum_out, blk.relu_out);
    prev = &blk.relu_out;
  }

  const detail::Plane& trunk = detail::trunk_output(ws);
  detail::conv3x3_forward(trunk, f, h, w, p.find("policy.weight"), p.find("policy.bias"),
                          ws.policy_pad, ws.policy_out);

  // Value head: global mean+max pooling, then two affine maps and tanh.
  ws.pooled.assign(2 * f, 0.0);
  ws.max_index.assign(f, 0);
  for (int c = 0; c < f; ++c) {
    const double* src = trunk.data() + static_cast<size_t>(c) * plane;
    double sum = 0, best = src[0];
    int best_i = 0;
    for (int i = 0; i < plane; ++i) {
      sum += src[i];
      if (src[i] > best) {
        best = src[i];
        best_i = i;
      }
    }
    ws.pooled[c] = sum / plane;
    ws.pooled[f + c] = best;
    ws.max_index[c] = best_i;
  }
  const Array& fc1w = p.find("value.fc1.weight");
  const Array& fc1b = p.find("value.fc1.bias");
  int hv = net.cfg.value_hidden;
  ws.fc1_out.assign(hv, 0.0);
  for (int i = 0; i < hv; ++i) {
    double acc = fc1b.v[i];
    const float* row = fc1w.v.data() + static_cast<size_t>(i) * 2 * f;
    for (int j = 0; j < 2 * f; ++j) acc += row[j] * ws.pooled[j];
    ws.fc1_out[i] = acc;
  }
  ws.fc1_relu.resize(hv);
  for (int i = 0; i < hv; ++i) ws.fc1_relu[i] = ws.fc1_out[i] > 0 ? ws.fc1_out[i] : 0.0;
  const Array& fc2w = p.find("value.fc2.weight");
  double u = p.find("value.fc2.bias").v[0];
  for (int i = 0; i < hv; ++i) u += fc2w.v[i] * ws.fc1_relu[i];
  // Clamp just inside the open interval: double tanh rounds to exactly 1
  // beyond |u| ~ 19, where the true gradient is already below 1e-16.
  constexpr double kCap = 1.0 - 1e-12;
  ws.value = std::clamp(std::tanh(u), -kCap, kCap);
}

// Policy restricted to the distinct legal logits: a softmax that counts each
// logit exactly once, no matter how many moves alias onto it.
inline std::vector<double> masked_softmax(const std::vector<double>& logits,
                                          const std::vector<int>& legal) {
  if (legal.empty()) throw ContractError("masked_softmax: no legal logits");
  double best = logits[legal[0]];
  for (int l : legal) best = std::max(best, logits[l]);
  std::vector<double> probs(legal.size());
  double z = 0;
  for (size_t i = 0; i < legal.size(); ++i) {
    probs[i] = std::exp(logits[legal[i]] - best);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  return probs;
}

struct Evaluation {
  std::vector<double> probs;  // aligned with the legal-logit list
  double value = 0.0;
};

inline Evaluation forward(const Net& net, const StateTensor& x, const std::vector<int>& legal,
                          Workspace& ws) {
  forward_raw(net, x, ws);
  Evaluation ev;
  ev.probs = masked_softmax(ws.policy_out, legal);
  ev.value = ws.value;
  return ev;
}

// One training example: encoded state, its distinct legal logits, the visit
// distribution over them (sums to 1), and the final outcome for the mover.
struct TrainSample {
  StateTensor x;
  std::vector<int> legal;
  std::vector<float> target;
  double z = 0.0;
};

using Gradients = std::vector<std::vector<double>>;

inline Gradients zero_gradients(const Parameters& params) {
  Gradients g(params.arrays.size());
  for (size_t i = 0; i < g.size(); ++i) g[i].assign(params.arrays[i].v.size(), 0.0);
  return g;
}

namespace detail {

struct GradSink {
  const Parameters& params;
  Gradients& g;
  std::vector<double>& of(const std::string& name) {
    for (size_t i = 0; i < params.arrays.size(); ++i)
      if (params.arrays[i].name == name) return g[i];
    throw ContractError("no gradient slot for " + name);
  }
};

}  // namespace detail

struct LossParts {
  double policy = 0.0;
  double value = 0.0;
  double decay = 0.0;
  double total() const { return policy + value + decay; }
};

// Mean policy cross-entropy + mean squared value error + L2 penalty over all
// parameter arrays. Gradients are exact; the finite-difference suite checks
// them against this exact loss.
inline LossParts loss_and_gradients(const Net& net, const std::vector<TrainSample>& batch,
                                    double weight_decay, Gradients& grads, Workspace& ws) {
  if (batch.empty()) throw ContractError("loss_and_gradients: empty batch");
  const Parameters& p = net.params;
  for (auto& slot : grads)
    std::fill(slot.begin(), slot.end(), 0.0);
  detail::GradSink sink{p, grads};
  int h = net.H, w = net.W, f = net.cfg.trunk_channels, plane = h * w, hv = net.cfg.value_hidden;
  double inv_b = 1.0 / batch.size();
  LossParts loss;

  for (const TrainSample& sample : batch) {
    if (sample.legal.empty() || sample.legal.size() != sample.target.size())
      throw ContractError("loss_and_gradients: malformed target support");
    forward_raw(net, sample.x, ws);

    // Policy: -sum target * log softmax(logits | legal).
    std::vector<double> probs = masked_softmax(ws.policy_out, sample.legal);
    double target_sum = 0;
    for (size_t i = 0; i < sample.legal.size(); ++i) {
      target_sum += sample.target[i];
      if (sample.target[i] > 0)
        loss.policy -= inv_b * sample.target[i] * std::log(std::max(probs[i], 1e-300));
    }
    loss.value += inv_b * (ws.value - sample.z) * (ws.value - sample.z);

    // d loss / d logits, zero off the legal support. The p * sum(t) term
    // keeps the gradient exact even when rounded targets miss 1 by an ulp.
    Workspace::Plane& d_policy = ws.d_tmp1;
    d_policy.assign(ws.policy_out.size(), 0.0);
    for (size_t i = 0; i < sample.legal.size(); ++i)
      d_policy[sample.legal[i]] = inv_b * (probs[i] * target_sum - sample.target[i]);

    // Value head backward.
    double du = inv_b * 2.0 * (ws.value - sample.z) * (1.0 - ws.value * ws.value);
    const Array& fc2w = p.find("value.fc2.weight");
    const Array& fc1w = p.find("value.fc1.weight");
    std::vector<double>& d_fc2w = sink.of("value.fc2.weight");
    std::vector<double>& d_fc1w = sink.of("value.fc1.weight");
    std::vector<double>& d_fc1b = sink.of("value.fc1.bias");
    sink.of("value.fc2.bias")[0] += du;
    std::vector<double> d_pooled(2 * f, 0.0);
    for (int i = 0; i < hv; ++i) {
      d_fc2w[i] += du * ws.fc1_relu[i];
      double dh = du * fc2w.v[i];
      if (ws.fc1_out[i] <= 0) continue;
      d_fc1b[i] += dh;
      const float* row = fc1w.v.data() + static_cast<size_t>(i) * 2 * f;
      double* drow = d_fc1w.data() + static_cast<size_t>(i) * 2 * f;
      for (int j = 0; j < 2 * f; ++j) {
        drow[j] += dh * ws.pooled[j];
        d_pooled[j] += dh * row[j];
      }
    }

    // Trunk gradient gathers the policy conv and both pooling paths.
    const Workspace::Plane& trunk = detail::trunk_output(ws);
    Workspace::Plane& d_trunk = ws.d_tmp2;
    detail::conv3x3_backward(ws.policy_pad, f, h, w, p.find("policy.weight"), d_policy, ws.d_pad,
                             d_trunk, sink.of("policy.weight"), sink.of("policy.bias"));
    for (int c = 0; c < f; ++c) {
      double dm = d_pooled[c] / plane;
      double* dst = d_trunk.data() + static_cast<size_t>(c) * plane;
      for (int i = 0; i < plane; ++i) dst[i] += dm;
      dst[ws.max_index[c]] += d_pooled[f + c];
    }
    (void)trunk;

    // Residual blocks, newest first.
    for (int b = net.cfg.residual_blocks - 1; b >= 0; --b) {
      Workspace::Block& blk = ws.blocks[b];
      std::string pre = "block" + std::to_string(b);
      const Workspace::Plane& bin = b == 0 ? ws.relu0_out : ws.blocks[b - 1].relu_out;
      Workspace::Plane& d_sum = ws.d_tmp1;
      detail::relu_backward(blk.sum_out, d_trunk, d_sum);
      Workspace::Plane& d_norm2_in = ws.d_tmp3;
      detail::norm_backward(blk.conv2_out, f, plane, p.find(pre + ".norm2.scale"), d_sum,
                            d_norm2_in, sink.of(pre + ".norm2.scale"), sink.of(pre + ".norm2.offset"));
      Workspace::Plane d_relu1;
      detail::conv3x3_backward(blk.conv2_pad, f, h, w, p.find(pre + ".conv2.weight"), d_norm2_in,
                               ws.d_pad, d_relu1, sink.of(pre + ".conv2.weight"),
                               sink.of(pre + ".conv2.bias"));
      Workspace::Plane& d_norm1_out = ws.d_tmp3;
      detail::relu_backward(blk.norm1_out, d_relu1, d_norm1_out);
      Workspace::Plane d_conv1_in;
      detail::norm_backward(blk.conv1_out, f, plane, p.find(pre + ".norm1.scale"), d_norm1_out,
                            d_conv1_in, sink.of(pre + ".norm1.scale"), sink.of(pre + ".norm1.offset"));
      Workspace::Plane d_bin;
      detail::conv3x3_backward(blk.conv1_pad, f, h, w, p.find(pre + ".conv1.weight"), d_conv1_in,
                               ws.d_pad, d_bin, sink.of(pre + ".conv1.weight"),
                               sink.of(pre + ".conv1.bias"));
      // Skip connection adds straight through.
      for (size_t i = 0; i < d_bin.size(); ++i) d_bin[i] += d_sum[i];
      d_trunk = d_bin;
      (void)bin;
    }

    Workspace::Plane& d_relu0 = d_trunk;
    Workspace::Plane& d_norm0_out = ws.d_tmp1;
    detail::relu_backward(ws.norm0_out, d_relu0, d_norm0_out);
    Workspace::Plane& d_conv0_out = ws.d_tmp3;
    detail::norm_backward(ws.conv0_out, f, plane, p.find("norm0.scale"), d_norm0_out, d_conv0_out,
                          sink.of("norm0.scale"), sink.of("norm0.offset"));
    Workspace::Plane d_input;
    detail::conv3x3_backward(ws.conv0_pad, net.C, h, w, p.find("conv0.weight"), d_conv0_out,
                             ws.d_pad, d_input, sink.of("conv0.weight"), sink.of("conv0.bias"));
  }

  // L2 penalty over every array, normalization and bias parameters included.
  for (size_t i = 0; i < p.arrays.size(); ++i) {
    const std::vector<float>& v = p.arrays[i].v;
    double sq = 0;
    for (size_t j = 0; j < v.size(); ++j) {
      sq += static_cast<double>(v[j]) * v[j];
      grads[i][j] += weight_decay * v[j];
    }
    loss.decay += 0.5 * weight_decay * sq;
  }
  return loss;
}

struct OptimizerState {
  std::vector<Array> velocity;  // momentum buffers mirroring the parameters

  static OptimizerState zeros(const Parameters& params) {
    OptimizerState st;
    for (const Array& a : params.arrays) st.velocity.push_back(Array::zeros(a.name, a.dims));
    return st;
  }
};

// Momentum SGD; the weight-decay force already sits inside the gradients.
inline void optimizer_step(Parameters& params, const Gradients& grads, OptimizerState& state,
                           double lr, double momentum) {
  if (grads.size() != params.arrays.size() || state.velocity.size() != params.arrays.size())
    throw ContractError("optimizer_step: shape mismatch");
  for (size_t i = 0; i < grads.size(); ++i)
    for (double g : grads[i])
      if (!std::isfinite(g)) throw ContractError("optimizer_step: non-finite gradient");
  for (size_t i = 0; i < params.arrays.size(); ++i) {
    std::vector<float>& v = state.velocity[i].v;
    std::vector<float>& w = params.arrays[i].v;
    for (size_t j = 0; j < w.size(); ++j) {
      v[j] = static_cast<float>(momentum * v[j] + grads[i][j]);
      w[j] -= static_cast<float>(lr * v[j]);
    }
  }
}

// ---------------------------------------------------------------------------
// Checkpoints: magic, version, UTF-8 metadata, named float32 arrays, and a
// trailing content digest. Round trips are bit-exact.

struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<Array> arrays;
};

namespace detail {

constexpr char kCheckpointMagic[4] = {'L', 'P', 'G', 'C'};
constexpr uint8_t kCheckpointVersion = 1;

struct ByteSink {
  std::string bytes;
  void u8(uint8_t v) { bytes.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes.append(s);
  }
  void floats(const std::vector<float>& v) {
    static_assert(sizeof(float) == 4);
    size_t at = bytes.size();
    bytes.resize(at + v.size() * 4);
    std::memcpy(bytes.data() + at, v.data(), v.size() * 4);
  }
};

struct ByteSource {
  const std::string& bytes;
  size_t at = 0;
  void need(size_t n) const {
    if (at + n > bytes.size()) throw IoError("checkpoint truncated");
  }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(bytes[at++]);
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[at++])) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[at++])) << (8 * i);
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s = bytes.substr(at, n);
    at += n;
    return s;
  }
  std::vector<float> floats(size_t n) {
    need(n * 4);
    std::vector<float> v(n);
    std::memcpy(v.data(), bytes.data() + at, n * 4);
    at += n * 4;
    return v;
  }
};

}  // namespace detail

inline std::string checkpoint_to_bytes(const Checkpoint& ckpt) {
  detail::ByteSink sink;
  sink.bytes.append(detail::kCheckpointMagic, 4);
  sink.u8(detail::kCheckpointVersion);
  sink.u32(static_cast<uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    sink.str(k);
    sink.str(v);
  }
  sink.u32(static_cast<uint32_t>(ckpt.arrays.size()));
  for (const Array& a : ckpt.arrays) {
    sink.str(a.name);
    sink.u32(static_cast<uint32_t>(a.dims.size()));
    size_t n = 1;
    for (int d : a.dims) {
      sink.u32(static_cast<uint32_t>(d));
      n *= static_cast<size_t>(d);
    }
    if (n != a.v.size()) throw ContractError("checkpoint: dims disagree with value count");
    sink.u64(n);
    sink.floats(a.v);
  }
  sink.u64(fnv1a64(sink.bytes.data(), sink.bytes.size()));
  return std::move(sink.bytes);
}

inline Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  if (bytes.size() < 13) throw IoError("checkpoint truncated");
  if (std::memcmp(bytes.data(), detail::kCheckpointMagic, 4) != 0)
    throw IoError("not a checkpoint file");
  uint64_t declared = 0;
  std::memcpy(&declared, bytes.data() + bytes.size() - 8, 8);
  uint64_t actual = fnv1a64(bytes.data(), bytes.size() - 8);
  if (declared != actual) throw IoError("checkpoint digest mismatch");

  detail::ByteSource src{bytes};
  src.at = 4;
  uint8_t version = src.u8();
  if (version != detail::kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  uint32_t n_meta = src.u32();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = src.str();
    ckpt.meta[k] = src.str();
  }
  uint32_t n_arrays = src.u32();
  for (uint32_t i = 0; i < n_arrays; ++i) {
    Array a;
    a.name = src.str();
    uint32_t rank = src.u32();
    if (rank > 8) throw IoError("checkpoint array rank out of range");
    for (uint32_t d = 0; d < rank; ++d) a.dims.push_back(static_cast<int>(src.u32()));
    uint64_t n = src.u64();
    size_t expect = 1;
    for (int d : a.dims) expect *= static_cast<size_t>(d);
    if (n != expect) throw IoError("checkpoint array size disagrees with dims");
    a.v = src.floats(n);
    ckpt.arrays.push_back(std::move(a));
  }
  if (src.at != bytes.size() - 8) throw IoError("checkpoint has trailing bytes");
  return ckpt;
}

// Write-then-rename so a crash never leaves a half-written file behind.
inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string bytes = checkpoint_to_bytes(ckpt);
  std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw IoError("cannot write " + tmp);
  size_t wrote = std::fwrite(bytes.data(), 1, bytes.size(), f);
  bool ok = wrote == bytes.size() && std::fclose(f) == 0;
  if (!ok) throw IoError("short write to " + tmp);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename into " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::string bytes;
  char buf[1 << 16];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) bytes.append(buf, n);
  std::fclose(f);
  return checkpoint_from_bytes(bytes);
}

// Network + optimizer bundle. Momentum buffers ride along under a prefix.
inline Checkpoint make_training_checkpoint(const Net& net, const OptimizerState& opt,
                                           const GameSpec& spec, const Codec& codec,
                                           std::map<std::string, std::string> extra = {}) {
  Checkpoint ckpt;
  ckpt.meta = std::move(extra);
  ckpt.meta["game"] = spec.name;
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(layout_fingerprint(spec, codec)));
  ckpt.meta["layout"] = fp;
  ckpt.meta["trunk_channels"] = std::to_string(net.cfg.trunk_channels);
  ckpt.meta["residual_blocks"] = std::to_string(net.cfg.residual_blocks);
  ckpt.meta["value_hidden"] = std::to_string(net.cfg.value_hidden);
  ckpt.arrays = net.params.arrays;
  for (const Array& a : opt.velocity) {
    Array m = a;
    m.name = "momentum." + m.name;
    ckpt.arrays.push_back(std::move(m));
  }
  return ckpt;
}

// Rebuilds a network (and optional optimizer state) for a specific game,
// refusing checkpoints whose tensor interface disagrees with the spec.
inline Net load_network(const Checkpoint& ckpt, const GameSpec& spec, const Codec& codec,
                        OptimizerState* opt = nullptr) {
  auto game = ckpt.meta.find("game");
  if (game == ckpt.meta.end() || game->second != spec.name)
    throw ConfigError("checkpoint is for game '" +
                      (game == ckpt.meta.end() ? std::string("?") : game->second) +
                      "', not '" + spec.name + "'");
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(layout_fingerprint(spec, codec)));
  auto layout = ckpt.meta.find("layout");
  if (layout == ckpt.meta.end() || layout->second != fp)
    throw ConfigError("checkpoint layout fingerprint mismatch for game '" + spec.name + "'");

  Net net;
  auto meta_int = [&](const char* key) {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end()) throw ConfigError(std::string("checkpoint missing ") + key);
    return std::stoi(it->second);
  };
  net.cfg.trunk_channels = meta_int("trunk_channels");
  net.cfg.residual_blocks = meta_int("residual_blocks");
  net.cfg.value_hidden = meta_int("value_hidden");
  net.C = codec.state.C;
  net.H = codec.grid.height;
  net.W = codec.grid.width;
  net.A = codec.move.A;

  Net shaped = init_network(codec, net.cfg, 0);
  for (const Array& want : shaped.params.arrays) {
    bool found = false;
    for (const Array& a : ckpt.arrays)
      if (a.name == want.name) {
        if (a.dims != want.dims) throw ConfigError("checkpoint array " + a.name + " has wrong shape");
        net.params.arrays.push_back(a);
        found = true;
        break;
      }
    if (!found) throw ConfigError("checkpoint missing array " + want.name);
  }
  if (opt) {
    opt->velocity.clear();
    for (const Array& want : shaped.params.arrays) {
      std::string name = "momentum." + want.name;
      bool found = false;
      for (const Array& a : ckpt.arrays)
        if (a.name == name) {
          Array m = a;
          m.name = want.name;
          opt->velocity.push_back(std::move(m));
          found = true;
          break;
        }
      if (!found) throw ConfigError("checkpoint missing array " + name);
    }
  }
  return net;
}

}  // namespace lgp
