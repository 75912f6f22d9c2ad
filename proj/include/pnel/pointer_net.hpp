#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pnel/common.hpp"

namespace pnel::pointer {

// Attention slot layout: three learned special slots, then one slot per
// candidate. The special input vectors are prepended to the encoder sequence,
// so their attention keys are ordinary encoder outputs.
inline constexpr std::size_t kBeginSlot = 0;
inline constexpr std::size_t kEndSlot = 1;
inline constexpr std::size_t kPadSlot = 2;
inline constexpr std::size_t kSpecialSlots = 3;

struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> w;

  void init(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    w.assign(r * c, 0.0f);
  }
  std::size_t size() const { return w.size(); }
};

struct PointerConfig {
  std::size_t input_dim = 1142;
  std::size_t hidden_dim = 512;  // per encoder direction; also the decoder width
  std::size_t attn_dim = 128;
  std::size_t max_input = 3000;  // longest accepted candidate sequence
  std::size_t max_outputs = 100;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_scale = 0.08;
};

// Pointer network over candidate feature vectors: bi-LSTM encoder, LSTM
// decoder initialized from the summed final encoder states, additive
// attention whose distribution is the pointer. Parameters are stored f32 and
// all math runs in f64, so checkpoints round-trip exactly and runs with equal
// seeds are bit-identical.
class PointerModel {
 public:
  enum ParamId {
    kEncFwdWx = 0,
    kEncFwdWh,
    kEncFwdB,
    kEncBwdWx,
    kEncBwdWh,
    kEncBwdB,
    kDecWx,
    kDecWh,
    kDecB,
    kAttnW1,
    kAttnW2,
    kAttnV,
    kSpecialBegin,
    kSpecialEnd,
    kSpecialPad,
    kParamCount,
  };

  using Grads = std::array<std::vector<double>, kParamCount>;

  PointerModel() = default;
  PointerModel(const PointerConfig& cfg, Rng& rng);

  const PointerConfig& config() const { return cfg_; }

  // Adjust the Adam step size mid-training; lets callers run decay schedules.
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

  // Mean negative log likelihood of the teacher-forced gold sequence (the
  // gold candidate indices followed by the end slot).
  double loss(const float* inputs, std::size_t n_cands, const std::vector<std::size_t>& gold) const;

  // Teacher-forced step distributions, one per target step, each over the
  // slot space: begin, end, pad, then one slot per candidate.
  std::vector<std::vector<double>> forward(const float* inputs, std::size_t n_cands,
                                           const std::vector<std::size_t>& gold) const;

  // Loss plus analytic parameter gradients, without updating anything.
  double gradients(const float* inputs, std::size_t n_cands, const std::vector<std::size_t>& gold,
                   Grads& out) const;

  // One Adam update from a single episode; returns the pre-update loss.
  double train_step(const float* inputs, std::size_t n_cands, const std::vector<std::size_t>& gold);

  // Greedy decode. Returns candidate indices in emission order; stops on the
  // end slot, a repeated pointer, or the output cap. Begin and pad slots are
  // not selectable here, though training may assign them probability.
  std::vector<std::size_t> decode(const float* inputs, std::size_t n_cands) const;

  void save(const std::string& path) const;
  static PointerModel load(const std::string& path);

  static std::string_view param_name(int id);
  Tensor& param(int id) { return params_[static_cast<std::size_t>(id)]; }
  const Tensor& param(int id) const { return params_[static_cast<std::size_t>(id)]; }
  Tensor* param_by_name(std::string_view name);
  std::uint64_t adam_step() const { return adam_t_; }

 private:
  struct Encoded;
  struct DecoderTrace;

  void allocate();
  void check_episode(const float* inputs, std::size_t n_cands,
                     const std::vector<std::size_t>& gold) const;
  std::vector<std::size_t> targets_of(const std::vector<std::size_t>& gold, std::size_t n_cands) const;
  void encode(Encoded& enc, const float* inputs, std::size_t n_cands) const;
  double run_teacher_forced(const Encoded& enc, const std::vector<std::size_t>& targets,
                            DecoderTrace& trace) const;
  void backprop(const Encoded& enc, const std::vector<std::size_t>& targets,
                const DecoderTrace& trace, Grads& g) const;

  PointerConfig cfg_;
  std::array<Tensor, kParamCount> params_;
  std::array<Tensor, kParamCount> adam_m_;
  std::array<Tensor, kParamCount> adam_v_;
  std::uint64_t adam_t_ = 0;
};

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Central-difference check of every parameter gradient on one episode,
// reporting max |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
// The numeric slope divides by the realized f32 step, not the nominal one.
// The model is restored bit-exactly before returning.
GradCheckResult grad_check(PointerModel& model, const float* inputs, std::size_t n_cands,
                           const std::vector<std::size_t>& gold, double delta = 1e-4);

}  // namespace pnel::pointer
