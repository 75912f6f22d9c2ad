#include "pnel/pointer_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>
#include <zlib.h>

#include "pnel/kernels.hpp"

namespace pnel::pointer {

namespace {

constexpr char kCheckpointMagic[4] = {'P', 'N', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

constexpr std::string_view kParamNames[PointerModel::kParamCount] = {
    "enc_fwd.wx", "enc_fwd.wh", "enc_fwd.b",
    "enc_bwd.wx", "enc_bwd.wh", "enc_bwd.b",
    "dec.wx",     "dec.wh",     "dec.b",
    "attn.w1",    "attn.w2",    "attn.v",
    "special.begin", "special.end", "special.pad",
};

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// One LSTM step with gate rows stacked i, f, g, o. `gates` comes out holding
// the post-activation values, which is what the backward pass needs.
void lstm_forward(const Tensor& wx, const Tensor& wh, const Tensor& b, std::size_t xdim,
                  std::size_t hdim, const double* x, const double* h_prev, const double* c_prev,
                  double* gates, double* h, double* c) {
  kernels::gate_preact(wx.w.data(), wh.w.data(), b.w.data(), 4 * hdim, xdim, hdim, x, h_prev, gates);
  for (std::size_t k = 0; k < hdim; ++k) {
    double i = sigmoid(gates[k]);
    double f = sigmoid(gates[hdim + k]);
    double g = std::tanh(gates[2 * hdim + k]);
    double o = sigmoid(gates[3 * hdim + k]);
    gates[k] = i;
    gates[hdim + k] = f;
    gates[2 * hdim + k] = g;
    gates[3 * hdim + k] = o;
    c[k] = f * c_prev[k] + i * g;
    h[k] = o * std::tanh(c[k]);
  }
}

// Consumes dh (dL/dh_t), advances dc from dL/dc_t to dL/dc_{t-1} in place and
// fills dz with the pre-activation gradients. c_prev may be null at the start
// of a sequence, where the previous cell state is all zeros.
void lstm_backward(const double* gates, const double* c, const double* c_prev, std::size_t hdim,
                   const double* dh, double* dc, double* dz) {
  for (std::size_t k = 0; k < hdim; ++k) {
    double i = gates[k];
    double f = gates[hdim + k];
    double g = gates[2 * hdim + k];
    double o = gates[3 * hdim + k];
    double tc = std::tanh(c[k]);
    double d_o = dh[k] * tc;
    double dck = dc[k] + dh[k] * o * (1.0 - tc * tc);
    double di = dck * g;
    double df = c_prev == nullptr ? 0.0 : dck * c_prev[k];
    double dg = dck * i;
    dz[k] = di * i * (1.0 - i);
    dz[hdim + k] = df * f * (1.0 - f);
    dz[2 * hdim + k] = dg * (1.0 - g * g);
    dz[3 * hdim + k] = d_o * o * (1.0 - o);
    dc[k] = dck * f;
  }
}

nlohmann::json config_to_json(const PointerConfig& c) {
  return nlohmann::json{
      {"input_dim", c.input_dim},       {"hidden_dim", c.hidden_dim},
      {"attn_dim", c.attn_dim},         {"max_input", c.max_input},
      {"max_outputs", c.max_outputs},
      {"learning_rate", c.learning_rate}, {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},     {"adam_eps", c.adam_eps},
      {"init_scale", c.init_scale},
  };
}

PointerConfig config_from_json(const nlohmann::json& j, const std::string& origin) {
  try {
    PointerConfig c;
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    c.attn_dim = j.at("attn_dim").get<std::size_t>();
    c.max_input = j.at("max_input").get<std::size_t>();
    c.max_outputs = j.at("max_outputs").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_eps = j.at("adam_eps").get<double>();
    c.init_scale = j.at("init_scale").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin + ": bad model config: " + e.what());
  }
}

std::uint32_t crc_of(const std::string& bytes, std::size_t len) {
  auto crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(len));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

struct PointerModel::Encoded {
  std::size_t slots = 0;
  std::vector<double> x;                     // slots x D
  std::vector<double> gates_f, h_f, c_f;     // slots x 4H / H / H
  std::vector<double> gates_b, h_b, c_b;
  std::vector<double> e;                     // slots x 2H, attention keys
  std::vector<double> p;                     // slots x A, W1 e precomputed
  std::vector<double> h0, c0;                // decoder init, H each
};

struct PointerModel::DecoderTrace {
  std::vector<std::size_t> in_slot;          // T
  std::vector<double> gates, h, c;           // T x 4H / H / H
  std::vector<double> q;                     // T x A
  std::vector<double> probs;                 // T x slots
};

PointerModel::PointerModel(const PointerConfig& cfg, Rng& rng) : cfg_(cfg) {
  if (cfg_.input_dim == 0 || cfg_.hidden_dim == 0 || cfg_.attn_dim == 0)
    throw ConfigError("model dimensions must be positive");
  if (cfg_.max_outputs == 0) throw ConfigError("max_outputs must be positive");
  allocate();

  const double s = cfg_.init_scale;
  const std::size_t h = cfg_.hidden_dim;
  for (int id = 0; id < kParamCount; ++id) {
    Tensor& t = params_[static_cast<std::size_t>(id)];
    if (id == kEncFwdB || id == kEncBwdB || id == kDecB) {
      // Biases start at zero with the forget gate open, which keeps early
      // training from washing out the cell state.
      for (std::size_t k = h; k < 2 * h; ++k) t.w[k] = 1.0f;
      continue;
    }
    for (float& w : t.w) w = static_cast<float>(rng.uniform(-s, s));
  }
}

void PointerModel::allocate() {
  const std::size_t d = cfg_.input_dim, h = cfg_.hidden_dim, a = cfg_.attn_dim;
  params_[kEncFwdWx].init(4 * h, d);
  params_[kEncFwdWh].init(4 * h, h);
  params_[kEncFwdB].init(4 * h, 1);
  params_[kEncBwdWx].init(4 * h, d);
  params_[kEncBwdWh].init(4 * h, h);
  params_[kEncBwdB].init(4 * h, 1);
  params_[kDecWx].init(4 * h, d);
  params_[kDecWh].init(4 * h, h);
  params_[kDecB].init(4 * h, 1);
  params_[kAttnW1].init(a, 2 * h);
  params_[kAttnW2].init(a, h);
  params_[kAttnV].init(a, 1);
  params_[kSpecialBegin].init(d, 1);
  params_[kSpecialEnd].init(d, 1);
  params_[kSpecialPad].init(d, 1);
  for (int id = 0; id < kParamCount; ++id) {
    adam_m_[static_cast<std::size_t>(id)].init(params_[static_cast<std::size_t>(id)].rows,
                                               params_[static_cast<std::size_t>(id)].cols);
    adam_v_[static_cast<std::size_t>(id)].init(params_[static_cast<std::size_t>(id)].rows,
                                               params_[static_cast<std::size_t>(id)].cols);
  }
}

std::string_view PointerModel::param_name(int id) { return kParamNames[static_cast<std::size_t>(id)]; }

Tensor* PointerModel::param_by_name(std::string_view name) {
  for (int id = 0; id < kParamCount; ++id)
    if (kParamNames[static_cast<std::size_t>(id)] == name) return &params_[static_cast<std::size_t>(id)];
  return nullptr;
}

void PointerModel::check_episode(const float* inputs, std::size_t n_cands,
                                 const std::vector<std::size_t>& gold) const {
  if (inputs == nullptr && n_cands > 0) throw InputError("null candidate inputs");
  if (n_cands > cfg_.max_input)
    throw InputError("episode has " + std::to_string(n_cands) + " candidates but the model accepts " +
                     std::to_string(cfg_.max_input));
  for (std::size_t g : gold)
    if (g >= n_cands) throw InputError("gold candidate index " + std::to_string(g) + " out of range");
}

std::vector<std::size_t> PointerModel::targets_of(const std::vector<std::size_t>& gold,
                                                  std::size_t /*n_cands*/) const {
  std::vector<std::size_t> targets;
  targets.reserve(gold.size() + 1);
  for (std::size_t g : gold) targets.push_back(g + kSpecialSlots);
  targets.push_back(kEndSlot);
  return targets;
}

void PointerModel::encode(Encoded& enc, const float* inputs, std::size_t n_cands) const {
  const std::size_t d = cfg_.input_dim, h = cfg_.hidden_dim, a = cfg_.attn_dim;
  const std::size_t s = n_cands + kSpecialSlots;
  enc.slots = s;

  enc.x.assign(s * d, 0.0);
  const float* specials[kSpecialSlots] = {params_[kSpecialBegin].w.data(),
                                          params_[kSpecialEnd].w.data(),
                                          params_[kSpecialPad].w.data()};
  for (std::size_t j = 0; j < kSpecialSlots; ++j)
    for (std::size_t k = 0; k < d; ++k) enc.x[j * d + k] = static_cast<double>(specials[j][k]);
  for (std::size_t j = 0; j < n_cands; ++j)
    for (std::size_t k = 0; k < d; ++k)
      enc.x[(kSpecialSlots + j) * d + k] = static_cast<double>(inputs[j * d + k]);

  enc.gates_f.assign(s * 4 * h, 0.0);
  enc.h_f.assign(s * h, 0.0);
  enc.c_f.assign(s * h, 0.0);
  enc.gates_b.assign(s * 4 * h, 0.0);
  enc.h_b.assign(s * h, 0.0);
  enc.c_b.assign(s * h, 0.0);

  const std::vector<double> zeros(h, 0.0);
  for (std::size_t t = 0; t < s; ++t) {
    const double* h_prev = t == 0 ? zeros.data() : enc.h_f.data() + (t - 1) * h;
    const double* c_prev = t == 0 ? zeros.data() : enc.c_f.data() + (t - 1) * h;
    lstm_forward(params_[kEncFwdWx], params_[kEncFwdWh], params_[kEncFwdB], d, h,
                 enc.x.data() + t * d, h_prev, c_prev, enc.gates_f.data() + t * 4 * h,
                 enc.h_f.data() + t * h, enc.c_f.data() + t * h);
  }
  for (std::size_t t = s; t-- > 0;) {
    const double* h_prev = t + 1 == s ? zeros.data() : enc.h_b.data() + (t + 1) * h;
    const double* c_prev = t + 1 == s ? zeros.data() : enc.c_b.data() + (t + 1) * h;
    lstm_forward(params_[kEncBwdWx], params_[kEncBwdWh], params_[kEncBwdB], d, h,
                 enc.x.data() + t * d, h_prev, c_prev, enc.gates_b.data() + t * 4 * h,
                 enc.h_b.data() + t * h, enc.c_b.data() + t * h);
  }

  enc.e.assign(s * 2 * h, 0.0);
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t k = 0; k < h; ++k) {
      enc.e[j * 2 * h + k] = enc.h_f[j * h + k];
      enc.e[j * 2 * h + h + k] = enc.h_b[j * h + k];
    }

  enc.p.assign(s * a, 0.0);
  kernels::project_rows(params_[kAttnW1].w.data(), a, 2 * h, enc.e.data(), s, enc.p.data());

  // The decoder starts from the sum of the two final encoder states.
  enc.h0.assign(h, 0.0);
  enc.c0.assign(h, 0.0);
  for (std::size_t k = 0; k < h; ++k) {
    enc.h0[k] = enc.h_f[(s - 1) * h + k] + enc.h_b[k];
    enc.c0[k] = enc.c_f[(s - 1) * h + k] + enc.c_b[k];
  }
}

double PointerModel::run_teacher_forced(const Encoded& enc, const std::vector<std::size_t>& targets,
                                        DecoderTrace& trace) const {
  const std::size_t d = cfg_.input_dim, h = cfg_.hidden_dim, a = cfg_.attn_dim;
  const std::size_t s = enc.slots, n = targets.size();

  trace.in_slot.resize(n);
  trace.gates.assign(n * 4 * h, 0.0);
  trace.h.assign(n * h, 0.0);
  trace.c.assign(n * h, 0.0);
  trace.q.assign(n * a, 0.0);
  trace.probs.assign(n * s, 0.0);

  std::vector<double> u(s, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    trace.in_slot[t] = t == 0 ? kBeginSlot : targets[t - 1];
    const double* h_prev = t == 0 ? enc.h0.data() : trace.h.data() + (t - 1) * h;
    const double* c_prev = t == 0 ? enc.c0.data() : trace.c.data() + (t - 1) * h;
    lstm_forward(params_[kDecWx], params_[kDecWh], params_[kDecB], d, h,
                 enc.x.data() + trace.in_slot[t] * d, h_prev, c_prev,
                 trace.gates.data() + t * 4 * h, trace.h.data() + t * h, trace.c.data() + t * h);
    kernels::matvec(params_[kAttnW2].w.data(), a, h, trace.h.data() + t * h, trace.q.data() + t * a);
    kernels::attn_scores(enc.p.data(), trace.q.data() + t * a, params_[kAttnV].w.data(), s, a, u.data());

    double mx = *std::max_element(u.begin(), u.end());
    double z = 0.0;
    for (std::size_t j = 0; j < s; ++j) z += std::exp(u[j] - mx);
    for (std::size_t j = 0; j < s; ++j) trace.probs[t * s + j] = std::exp(u[j] - mx) / z;
    total += -(u[targets[t]] - mx - std::log(z));
  }
  return total / static_cast<double>(n);
}

void PointerModel::backprop(const Encoded& enc, const std::vector<std::size_t>& targets,
                            const DecoderTrace& trace, Grads& g) const {
  const std::size_t d = cfg_.input_dim, h = cfg_.hidden_dim, a = cfg_.attn_dim;
  const std::size_t s = enc.slots, n = targets.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> dp(s * a, 0.0), de(s * 2 * h, 0.0), dx(s * d, 0.0);
  std::vector<double> du(s), dq(a), dz(4 * h), dh(h, 0.0), dc(h, 0.0);
  std::vector<double> dh_attn(n * h, 0.0);

  // Attention backward per step: independent of the recurrences, so it runs
  // first and leaves per-step dL/dh contributions for the decoder BPTT.
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < s; ++j)
      du[j] = (trace.probs[t * s + j] - (j == targets[t] ? 1.0 : 0.0)) * inv_n;
    std::fill(dq.begin(), dq.end(), 0.0);
    kernels::attn_backward_step(enc.p.data(), trace.q.data() + t * a, params_[kAttnV].w.data(),
                                du.data(), s, a, dp.data(), dq.data(), g[kAttnV].data());
    kernels::outer_acc(g[kAttnW2].data(), a, h, dq.data(), trace.h.data() + t * h);
    kernels::matvec_t_acc(params_[kAttnW2].w.data(), a, h, dq.data(), dh_attn.data() + t * h);
  }

  // Decoder BPTT.
  for (std::size_t t = n; t-- > 0;) {
    for (std::size_t k = 0; k < h; ++k) dh[k] += dh_attn[t * h + k];
    const double* h_prev = t == 0 ? enc.h0.data() : trace.h.data() + (t - 1) * h;
    const double* c_prev = t == 0 ? enc.c0.data() : trace.c.data() + (t - 1) * h;
    lstm_backward(trace.gates.data() + t * 4 * h, trace.c.data() + t * h, c_prev, h, dh.data(),
                  dc.data(), dz.data());
    kernels::outer_acc(g[kDecWx].data(), 4 * h, d, dz.data(), enc.x.data() + trace.in_slot[t] * d);
    kernels::outer_acc(g[kDecWh].data(), 4 * h, h, dz.data(), h_prev);
    for (std::size_t r = 0; r < 4 * h; ++r) g[kDecB][r] += dz[r];
    kernels::matvec_t_acc(params_[kDecWx].w.data(), 4 * h, d, dz.data(),
                          dx.data() + trace.in_slot[t] * d);
    std::fill(dh.begin(), dh.end(), 0.0);
    kernels::matvec_t_acc(params_[kDecWh].w.data(), 4 * h, h, dz.data(), dh.data());
  }
  // What is left in dh/dc is the gradient at the decoder init, which feeds
  // both final encoder states.
  std::vector<double> dh0(dh), dc0(dc);

  // Attention key path back to the encoder outputs.
  kernels::accum_gram(g[kAttnW1].data(), a, 2 * h, dp.data(), enc.e.data(), s);
  kernels::project_rows_t_acc(params_[kAttnW1].w.data(), a, 2 * h, dp.data(), s, de.data());

  std::vector<double> dh_f(s * h, 0.0), dh_b(s * h, 0.0);
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t k = 0; k < h; ++k) {
      dh_f[j * h + k] = de[j * 2 * h + k];
      dh_b[j * h + k] = de[j * 2 * h + h + k];
    }
  for (std::size_t k = 0; k < h; ++k) {
    dh_f[(s - 1) * h + k] += dh0[k];
    dh_b[k] += dh0[k];
  }

  // Forward-direction encoder BPTT, newest step first.
  std::fill(dh.begin(), dh.end(), 0.0);
  dc = dc0;
  for (std::size_t j = s; j-- > 0;) {
    for (std::size_t k = 0; k < h; ++k) dh[k] += dh_f[j * h + k];
    const double* h_prev = j == 0 ? nullptr : enc.h_f.data() + (j - 1) * h;
    const double* c_prev = j == 0 ? nullptr : enc.c_f.data() + (j - 1) * h;
    lstm_backward(enc.gates_f.data() + j * 4 * h, enc.c_f.data() + j * h, c_prev, h, dh.data(),
                  dc.data(), dz.data());
    kernels::outer_acc(g[kEncFwdWx].data(), 4 * h, d, dz.data(), enc.x.data() + j * d);
    if (h_prev != nullptr) kernels::outer_acc(g[kEncFwdWh].data(), 4 * h, h, dz.data(), h_prev);
    for (std::size_t r = 0; r < 4 * h; ++r) g[kEncFwdB][r] += dz[r];
    kernels::matvec_t_acc(params_[kEncFwdWx].w.data(), 4 * h, d, dz.data(), dx.data() + j * d);
    std::fill(dh.begin(), dh.end(), 0.0);
    kernels::matvec_t_acc(params_[kEncFwdWh].w.data(), 4 * h, h, dz.data(), dh.data());
  }

  // Backward-direction encoder BPTT; that LSTM ran from the last slot to the
  // first, so its unroll reverses into increasing slot order.
  std::fill(dh.begin(), dh.end(), 0.0);
  dc = dc0;
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t k = 0; k < h; ++k) dh[k] += dh_b[j * h + k];
    const double* h_prev = j + 1 == s ? nullptr : enc.h_b.data() + (j + 1) * h;
    const double* c_prev = j + 1 == s ? nullptr : enc.c_b.data() + (j + 1) * h;
    lstm_backward(enc.gates_b.data() + j * 4 * h, enc.c_b.data() + j * h, c_prev, h, dh.data(),
                  dc.data(), dz.data());
    kernels::outer_acc(g[kEncBwdWx].data(), 4 * h, d, dz.data(), enc.x.data() + j * d);
    if (h_prev != nullptr) kernels::outer_acc(g[kEncBwdWh].data(), 4 * h, h, dz.data(), h_prev);
    for (std::size_t r = 0; r < 4 * h; ++r) g[kEncBwdB][r] += dz[r];
    kernels::matvec_t_acc(params_[kEncBwdWx].w.data(), 4 * h, d, dz.data(), dx.data() + j * d);
    std::fill(dh.begin(), dh.end(), 0.0);
    kernels::matvec_t_acc(params_[kEncBwdWh].w.data(), 4 * h, h, dz.data(), dh.data());
  }

  // The special input vectors are parameters; their rows of dx are their
  // gradients. Candidate rows of dx belong to the data and are dropped.
  for (std::size_t j = 0; j < kSpecialSlots; ++j)
    for (std::size_t k = 0; k < d; ++k) g[kSpecialBegin + j][k] += dx[j * d + k];
}

double PointerModel::loss(const float* inputs, std::size_t n_cands,
                          const std::vector<std::size_t>& gold) const {
  check_episode(inputs, n_cands, gold);
  Encoded enc;
  encode(enc, inputs, n_cands);
  DecoderTrace trace;
  return run_teacher_forced(enc, targets_of(gold, n_cands), trace);
}

std::vector<std::vector<double>> PointerModel::forward(const float* inputs, std::size_t n_cands,
                                                       const std::vector<std::size_t>& gold) const {
  check_episode(inputs, n_cands, gold);
  Encoded enc;
  encode(enc, inputs, n_cands);
  DecoderTrace trace;
  auto targets = targets_of(gold, n_cands);
  run_teacher_forced(enc, targets, trace);

  std::vector<std::vector<double>> steps(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t)
    steps[t].assign(trace.probs.begin() + static_cast<std::ptrdiff_t>(t * enc.slots),
                    trace.probs.begin() + static_cast<std::ptrdiff_t>((t + 1) * enc.slots));
  return steps;
}

double PointerModel::gradients(const float* inputs, std::size_t n_cands,
                               const std::vector<std::size_t>& gold, Grads& out) const {
  check_episode(inputs, n_cands, gold);
  auto targets = targets_of(gold, n_cands);
  Encoded enc;
  encode(enc, inputs, n_cands);
  DecoderTrace trace;
  double l = run_teacher_forced(enc, targets, trace);
  for (int id = 0; id < kParamCount; ++id)
    out[static_cast<std::size_t>(id)].assign(params_[static_cast<std::size_t>(id)].size(), 0.0);
  backprop(enc, targets, trace, out);
  return l;
}

double PointerModel::train_step(const float* inputs, std::size_t n_cands,
                                const std::vector<std::size_t>& gold) {
  Grads g;
  double l = gradients(inputs, n_cands, gold, g);
  if (!std::isfinite(l))
    throw InputError("non-finite training loss (" + std::to_string(l) + "); aborting before the update");

  adam_t_ += 1;
  const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
  for (int id = 0; id < kParamCount; ++id) {
    Tensor& p = params_[static_cast<std::size_t>(id)];
    Tensor& m = adam_m_[static_cast<std::size_t>(id)];
    Tensor& v = adam_v_[static_cast<std::size_t>(id)];
    const std::vector<double>& gr = g[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < p.size(); ++i) {
      double mm = b1 * static_cast<double>(m.w[i]) + (1.0 - b1) * gr[i];
      double vv = b2 * static_cast<double>(v.w[i]) + (1.0 - b2) * gr[i] * gr[i];
      m.w[i] = static_cast<float>(mm);
      v.w[i] = static_cast<float>(vv);
      double step = cfg_.learning_rate * (mm / bc1) / (std::sqrt(vv / bc2) + cfg_.adam_eps);
      p.w[i] = static_cast<float>(static_cast<double>(p.w[i]) - step);
    }
  }
  return l;
}

std::vector<std::size_t> PointerModel::decode(const float* inputs, std::size_t n_cands) const {
  check_episode(inputs, n_cands, {});
  Encoded enc;
  encode(enc, inputs, n_cands);

  const std::size_t d = cfg_.input_dim, h = cfg_.hidden_dim, a = cfg_.attn_dim;
  const std::size_t s = enc.slots;
  std::vector<double> gates(4 * h), h_cur(enc.h0), c_cur(enc.c0), h_next(h), c_next(h);
  std::vector<double> q(a), u(s);
  std::vector<char> pointed(s, 0);
  std::vector<std::size_t> out;

  std::size_t cur_slot = kBeginSlot;
  while (out.size() < cfg_.max_outputs) {
    lstm_forward(params_[kDecWx], params_[kDecWh], params_[kDecB], d, h,
                 enc.x.data() + cur_slot * d, h_cur.data(), c_cur.data(), gates.data(),
                 h_next.data(), c_next.data());
    kernels::matvec(params_[kAttnW2].w.data(), a, h, h_next.data(), q.data());
    kernels::attn_scores(enc.p.data(), q.data(), params_[kAttnV].w.data(), s, a, u.data());

    u[kBeginSlot] = -std::numeric_limits<double>::infinity();
    u[kPadSlot] = -std::numeric_limits<double>::infinity();
    std::size_t best = kEndSlot;
    for (std::size_t j = 0; j < s; ++j)
      if (u[j] > u[best]) best = j;

    if (best == kEndSlot) break;
    if (pointed[best]) break;  // a repeated pointer would cycle forever
    pointed[best] = 1;
    out.push_back(best - kSpecialSlots);
    cur_slot = best;
    h_cur.swap(h_next);
    c_cur.swap(c_next);
  }
  return out;
}

void PointerModel::save(const std::string& path) const {
  std::string buf;
  buf.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  io::put_u32(buf, kCheckpointVersion);

  nlohmann::json meta{{"config", config_to_json(cfg_)}, {"adam_t", adam_t_}};
  std::string header = meta.dump();
  io::put_u32(buf, static_cast<std::uint32_t>(header.size()));
  buf += header;

  auto blob = [&](const std::string& name, const Tensor& t) {
    io::put_string(buf, name);
    io::put_u32(buf, static_cast<std::uint32_t>(t.rows));
    io::put_u32(buf, static_cast<std::uint32_t>(t.cols));
    for (float w : t.w) io::put_f32(buf, w);
  };
  for (int id = 0; id < kParamCount; ++id) blob(std::string(param_name(id)), params_[static_cast<std::size_t>(id)]);
  for (int id = 0; id < kParamCount; ++id)
    blob("adam_m." + std::string(param_name(id)), adam_m_[static_cast<std::size_t>(id)]);
  for (int id = 0; id < kParamCount; ++id)
    blob("adam_v." + std::string(param_name(id)), adam_v_[static_cast<std::size_t>(id)]);

  io::put_u32(buf, crc_of(buf, buf.size()));
  io::write_file(path, buf);
}

PointerModel PointerModel::load(const std::string& path) {
  std::string buf = io::read_file(path);
  if (buf.size() < sizeof(kCheckpointMagic) + 8 ||
      buf.compare(0, sizeof(kCheckpointMagic), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
    throw FormatError(path + ": not a checkpoint file");
  if (buf.size() < 4) throw FormatError(path + ": truncated checkpoint");
  if (crc_of(buf, buf.size() - 4) !=
      io::Reader(std::string_view(buf).substr(buf.size() - 4)).u32())
    throw ChecksumError(path + ": checkpoint checksum mismatch");

  io::Reader r(std::string_view(buf.data(), buf.size() - 4));
  r.bytes(sizeof(kCheckpointMagic));
  std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw FormatError(path + ": unsupported checkpoint version " + std::to_string(version));

  std::uint32_t header_len = r.u32();
  std::string_view header = r.bytes(header_len);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(header);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": bad checkpoint header: " + e.what());
  }

  PointerModel model;
  model.cfg_ = config_from_json(meta.value("config", nlohmann::json::object()), path);
  if (!meta.contains("adam_t") || !meta["adam_t"].is_number_unsigned())
    throw FormatError(path + ": bad checkpoint header: missing adam_t");
  model.adam_t_ = meta["adam_t"].get<std::uint64_t>();
  model.allocate();

  auto read_blob = [&](const std::string& name, Tensor& t) {
    std::string got = r.str();
    if (got != name)
      throw FormatError(path + ": expected tensor '" + name + "', found '" + got + "'");
    std::uint32_t rows = r.u32(), cols = r.u32();
    if (rows != t.rows || cols != t.cols)
      throw FormatError(path + ": tensor '" + name + "' has shape " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", config implies " + std::to_string(t.rows) + "x" +
                        std::to_string(t.cols));
    for (float& w : t.w) w = r.f32();
  };
  for (int id = 0; id < kParamCount; ++id)
    read_blob(std::string(param_name(id)), model.params_[static_cast<std::size_t>(id)]);
  for (int id = 0; id < kParamCount; ++id)
    read_blob("adam_m." + std::string(param_name(id)), model.adam_m_[static_cast<std::size_t>(id)]);
  for (int id = 0; id < kParamCount; ++id)
    read_blob("adam_v." + std::string(param_name(id)), model.adam_v_[static_cast<std::size_t>(id)]);
  if (r.remaining() != 0) throw FormatError(path + ": trailing bytes after tensors");
  return model;
}

GradCheckResult grad_check(PointerModel& model, const float* inputs, std::size_t n_cands,
                           const std::vector<std::size_t>& gold, double delta) {
  PointerModel::Grads analytic;
  model.gradients(inputs, n_cands, gold, analytic);

  GradCheckResult res;
  for (int id = 0; id < PointerModel::kParamCount; ++id) {
    Tensor& t = model.param(id);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const float saved = t.w[i];
      const double step = std::max(delta, std::abs(static_cast<double>(saved)) * delta);
      const float hi = static_cast<float>(static_cast<double>(saved) + step);
      const float lo = static_cast<float>(static_cast<double>(saved) - step);

      t.w[i] = hi;
      double l_hi = model.loss(inputs, n_cands, gold);
      t.w[i] = lo;
      double l_lo = model.loss(inputs, n_cands, gold);
      t.w[i] = saved;

      const double realized = static_cast<double>(hi) - static_cast<double>(lo);
      const double numeric = (l_hi - l_lo) / realized;
      const double ana = analytic[static_cast<std::size_t>(id)][i];
      const double err = std::abs(numeric - ana) / std::max(1e-8, std::abs(numeric) + std::abs(ana));
      if (err > res.max_rel_err) {
        res.max_rel_err = err;
        res.worst_param = std::string(PointerModel::param_name(id));
        res.worst_index = i;
      }
      ++res.checked;
    }
  }
  return res;
}

}  // namespace pnel::pointer
