#pragma once

#include <vector>

#include "dnclab/corpus/types.hpp"
#include "dnclab/dnc/interface.hpp"
#include "dnclab/dnc/ops.hpp"
#include "dnclab/dnc/params.hpp"

namespace dnclab::dnc {

// Concrete (Mat-valued) per-step record of everything the probe needs.
struct ControlSignalsRec {
  nn::Mat read_keys;       // R x W, one row per head
  nn::Mat read_strengths;  // R x 1
  nn::Mat write_key;       // W x 1
  double write_strength = 0.0;
  nn::Mat erase_vector;    // W x 1
  nn::Mat write_vector;    // W x 1
  nn::Mat free_gates;      // R x 1
  double allocation_gate = 0.0;
  double write_gate = 0.0;
};

struct TraceStep {
  ControlSignalsRec signals;
  nn::Mat write_weighting;               // N x 1
  std::vector<nn::Mat> read_weightings;  // R of N x 1
  nn::Mat read_vectors;                  // P x 1
  nn::Mat logits;                        // Y x 1
};

struct Trace {
  std::vector<TraceStep> steps;
  std::vector<int> token_ids;
  std::vector<corpus::Segment> segment_tags;
};

template <class V>
struct MemoryState {
  V memory;                 // N x W
  V usage;                  // N x 1
  V write_weighting;        // N x 1
  std::vector<V> read_weightings;  // R of N x 1
  V read_vectors;           // P x 1
};

template <class V>
struct LstmState {
  V h, c;
};

// zero-mean unit-variance normalization over the vector's entries
template <class V>
V layer_norm(const V& z) {
  const int n = values(z).rows;
  auto centered = sadd(z, scale(scale(sum(z), 1.0 / n), -1.0));
  auto variance = scale(sum(emul(centered, centered)), 1.0 / n);
  return sdiv(centered, sqrt_m(addc(variance, 1e-6)));
}

template <class V>
LstmState<V> lstm_step(const LstmLayer<V>& layer, const V& input, const LstmState<V>& prev,
                       bool normalized) {
  const int hidden = values(prev.h).rows;
  auto pre = add(matmul(layer.w_x, input), matmul(layer.w_h, prev.h));
  auto z = normalized ? add(emul(layer.ln_gain, layer_norm(pre)), layer.b) : add(pre, layer.b);
  auto gate_i = sigmoid(slice(z, 0, hidden));
  auto gate_f = sigmoid(slice(z, hidden, hidden));
  auto gate_o = sigmoid(slice(z, 2 * hidden, hidden));
  auto cand = tanh_m(slice(z, 3 * hidden, hidden));
  LstmState<V> next;
  next.c = add(emul(gate_i, cand), emul(gate_f, prev.c));
  next.h = emul(gate_o, tanh_m(next.c));
  return next;
}

// Memory, usage and weightings start zeroed for every sequence: stories are
// independent.
template <class V>
MemoryState<V> zero_memory_state(const V& sibling, const DncConfig& c) {
  MemoryState<V> s;
  s.memory = constant_like(sibling, nn::Mat(c.memory_rows, c.memory_width));
  s.usage = constant_like(sibling, nn::Mat(c.memory_rows, 1));
  s.write_weighting = constant_like(sibling, nn::Mat(c.memory_rows, 1));
  for (int r = 0; r < c.read_heads; ++r)
    s.read_weightings.push_back(constant_like(sibling, nn::Mat(c.memory_rows, 1)));
  s.read_vectors = constant_like(sibling, nn::Mat(c.read_concat(), 1));
  return s;
}

// One full DNC pass over a token sequence. The order within a time-step is
// controller -> interface -> usage update -> allocation -> write -> read ->
// output (write happens before read). Returns per-step logits; fills
// `trace` when non-null.
template <class V>
std::vector<V> run_dnc(const DncParamsT<V>& params, const DncConfig& config,
                       const std::vector<int>& token_ids, Trace* trace = nullptr) {
  config.validate();
  const int steps = int(token_ids.size());
  auto one_hot = [&](int id) {
    nn::Mat x(config.input_size, 1);
    if (id < 0 || id >= config.input_size)
      throw std::out_of_range("run_dnc: token id " + std::to_string(id) + " outside input size " +
                              std::to_string(config.input_size));
    x[id] = 1.0;
    return constant_like(params.w_v, x);
  };

  auto zero_lstm = [&](int n_layers) {
    std::vector<LstmState<V>> st;
    for (int l = 0; l < n_layers; ++l)
      st.push_back({constant_like(params.w_v, nn::Mat(config.hidden, 1)),
                    constant_like(params.w_v, nn::Mat(config.hidden, 1))});
    return st;
  };

  // backward-direction controller sees the raw inputs only, right to left
  std::vector<V> bwd_h(static_cast<size_t>(steps));
  if (config.bidirectional) {
    auto st = zero_lstm(config.layers);
    for (int t = steps - 1; t >= 0; --t) {
      V input = one_hot(token_ids[t]);
      for (int l = 0; l < config.layers; ++l) {
        st[l] = lstm_step(params.bwd[l], input, st[l], config.layer_norm);
        input = st[l].h;
      }
      bwd_h[t] = input;
    }
  }

  auto fwd_state = zero_lstm(config.layers);
  MemoryState<V> mem = zero_memory_state(params.w_v, config);
  std::vector<V> logits;
  logits.reserve(steps);

  for (int t = 0; t < steps; ++t) {
    V input = vcat(std::vector<V>{one_hot(token_ids[t]), mem.read_vectors});
    for (int l = 0; l < config.layers; ++l) {
      fwd_state[l] = lstm_step(params.fwd[l], input, fwd_state[l], config.layer_norm);
      input = fwd_state[l].h;
    }
    V features = config.bidirectional ? vcat(std::vector<V>{input, bwd_h[t]}) : input;
    V ctrl_out = add(matmul(params.w_ctrl, features), params.b_ctrl);
    V raw_iface = add(matmul(params.w_iface, features), params.b_iface);
    ControlSignals<V> sig = parse_interface(raw_iface, config);

    V usage = update_usage(mem.usage, mem.write_weighting, mem.read_weightings, sig.free_gates);
    V alloc = allocation_weighting(usage);
    V content_w = content_address(mem.memory, sig.write_key, sig.write_strength);
    V write_w = write_weighting(content_w, alloc, sig.allocation_gate, sig.write_gate);
    V memory = memory_write(mem.memory, write_w, sig.erase_vector, sig.write_vector);
    ReadResult<V> read = memory_read(memory, sig.read_keys, sig.read_strengths);
    V y = output_logits(params.w_v, params.w_mu, params.b, ctrl_out, read.read_vectors);

    if (trace) {
      TraceStep rec;
      nn::Mat keys(config.read_heads, config.memory_width);
      for (int r = 0; r < config.read_heads; ++r)
        for (int w = 0; w < config.memory_width; ++w) keys.at(r, w) = values(sig.read_keys[r])[w];
      rec.signals.read_keys = std::move(keys);
      rec.signals.read_strengths = values(sig.read_strengths);
      rec.signals.write_key = values(sig.write_key);
      rec.signals.write_strength = values(sig.write_strength).item();
      rec.signals.erase_vector = values(sig.erase_vector);
      rec.signals.write_vector = values(sig.write_vector);
      rec.signals.free_gates = values(sig.free_gates);
      rec.signals.allocation_gate = values(sig.allocation_gate).item();
      rec.signals.write_gate = values(sig.write_gate).item();
      rec.write_weighting = values(write_w);
      for (const V& w : read.weightings) rec.read_weightings.push_back(values(w));
      rec.read_vectors = values(read.read_vectors);
      rec.logits = values(y);
      trace->steps.push_back(std::move(rec));
    }

    mem.memory = std::move(memory);
    mem.usage = std::move(usage);
    mem.write_weighting = std::move(write_w);
    mem.read_weightings = std::move(read.weightings);
    mem.read_vectors = std::move(read.read_vectors);
    logits.push_back(std::move(y));
  }
  return logits;
}

struct ForwardResult {
  std::vector<nn::Mat> logits;    // per step, Y x 1
  std::vector<int> predictions;   // argmax at each answer position, in order
  Trace trace;                    // populated iff requested
  bool has_trace = false;
};

// Inference entry point. Predictions are taken at the '-' positions;
// argmax ties resolve to the lowest index.
ForwardResult forward(const DncParams& params, const DncConfig& config,
                      const corpus::EncodedSequence& sequence, bool record_trace = false);

}  // namespace dnclab::dnc
