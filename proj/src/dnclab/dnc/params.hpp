#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dnclab/dnc/config.hpp"
#include "dnclab/nn/mat.hpp"
#include "dnclab/nn/tape.hpp"

namespace dnclab::dnc {

// One stacked-LSTM layer. Gate order inside w_x/w_h/b is (input, forget,
// output, candidate), each block `hidden` rows tall.
template <class V>
struct LstmLayer {
  V w_x;      // 4H x in
  V w_h;      // 4H x H
  V b;        // 4H x 1
  V ln_gain;  // 4H x 1, layer-norm gain (ones when layer norm is off)
};

// All trainable weights. Layer 0 of `fwd` consumes [x_t; mu_{t-1}]; the
// optional backward stack consumes x_t alone, right to left, so the
// controller stays causal with respect to memory reads.
template <class V>
struct DncParamsT {
  std::vector<LstmLayer<V>> fwd;
  std::vector<LstmLayer<V>> bwd;  // empty when unidirectional
  V w_ctrl;   // C x Heff
  V b_ctrl;   // C x 1
  V w_iface;  // I x Heff
  V b_iface;  // I x 1
  V w_v;      // Y x C
  V w_mu;     // Y x P
  V b;        // Y x 1
};

using DncParams = DncParamsT<nn::Mat>;

// Visit every parameter in declared order with its canonical name. The
// order is the checkpoint's array order.
template <class V, class Fn>
void for_each_param(DncParamsT<V>& p, Fn&& fn) {
  for (size_t i = 0; i < p.fwd.size(); ++i) {
    const std::string pre = "fwd" + std::to_string(i) + ".";
    fn(pre + "w_x", p.fwd[i].w_x);
    fn(pre + "w_h", p.fwd[i].w_h);
    fn(pre + "b", p.fwd[i].b);
    fn(pre + "ln_g", p.fwd[i].ln_gain);
  }
  for (size_t i = 0; i < p.bwd.size(); ++i) {
    const std::string pre = "bwd" + std::to_string(i) + ".";
    fn(pre + "w_x", p.bwd[i].w_x);
    fn(pre + "w_h", p.bwd[i].w_h);
    fn(pre + "b", p.bwd[i].b);
    fn(pre + "ln_g", p.bwd[i].ln_gain);
  }
  fn("w_ctrl", p.w_ctrl);
  fn("b_ctrl", p.b_ctrl);
  fn("w_iface", p.w_iface);
  fn("b_iface", p.b_iface);
  fn("w_v", p.w_v);
  fn("w_mu", p.w_mu);
  fn("b", p.b);
}

template <class V, class Fn>
void for_each_param(const DncParamsT<V>& p, Fn&& fn) {
  for_each_param(const_cast<DncParamsT<V>&>(p), [&](const std::string& name, V& v) {
    fn(name, const_cast<const V&>(v));
  });
}

// Seeded Xavier-uniform weights, zero biases except forget gates at 1.
DncParams init_params(const DncConfig& config, uint64_t seed);

// Register every parameter as a trainable leaf on the tape.
DncParamsT<nn::Var> lift_params(nn::Tape& tape, const DncParams& params);

int64_t count_params(const DncParams& params);

}  // namespace dnclab::dnc
