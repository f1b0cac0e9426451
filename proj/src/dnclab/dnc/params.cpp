#include "dnclab/dnc/params.hpp"

#include <cmath>

#include "dnclab/dnc/interface.hpp"
#include "dnclab/nn/rng.hpp"

namespace dnclab::dnc {

namespace {

nn::Mat xavier(int rows, int cols, nn::Rng& rng) {
  nn::Mat m(rows, cols);
  const double s = std::sqrt(6.0 / double(rows + cols));
  for (double& x : m.a) x = rng.uniform(-s, s);
  return m;
}

LstmLayer<nn::Mat> init_lstm(int in, int hidden, nn::Rng& rng) {
  LstmLayer<nn::Mat> l;
  l.w_x = xavier(4 * hidden, in, rng);
  l.w_h = xavier(4 * hidden, hidden, rng);
  l.b = nn::Mat(4 * hidden, 1);
  for (int i = hidden; i < 2 * hidden; ++i) l.b[i] = 1.0;  // forget gates open at init
  l.ln_gain = nn::Mat(4 * hidden, 1, 1.0);
  return l;
}

}  // namespace

DncParams init_params(const DncConfig& config, uint64_t seed) {
  config.validate();
  nn::Rng rng(nn::splitmix64(seed));
  DncParams p;
  int in = config.input_size + config.read_concat();
  for (int l = 0; l < config.layers; ++l) {
    p.fwd.push_back(init_lstm(in, config.hidden, rng));
    in = config.hidden;
  }
  if (config.bidirectional) {
    in = config.input_size;
    for (int l = 0; l < config.layers; ++l) {
      p.bwd.push_back(init_lstm(in, config.hidden, rng));
      in = config.hidden;
    }
  }
  const int heff = config.ctrl_feature();
  p.w_ctrl = xavier(config.ctrl_output, heff, rng);
  p.b_ctrl = nn::Mat(config.ctrl_output, 1);
  p.w_iface = xavier(config.interface_size(), heff, rng);
  p.b_iface = nn::Mat(config.interface_size(), 1);
  // start with decisive memory behavior: sharp addressing, allocation-driven
  // confident writes, reluctant freeing; everything remains trainable
  const InterfaceLayout layout = interface_layout(config);
  for (int r = 0; r < config.read_heads; ++r) {
    p.b_iface[layout.read_strengths + r] = 3.0;
    p.b_iface[layout.free_gates + r] = -2.0;
  }
  p.b_iface[layout.write_strength] = 3.0;
  p.b_iface[layout.allocation_gate] = 2.0;
  p.b_iface[layout.write_gate] = 2.0;
  p.w_v = xavier(config.output_size, config.ctrl_output, rng);
  p.w_mu = xavier(config.output_size, config.read_concat(), rng);
  p.b = nn::Mat(config.output_size, 1);
  return p;
}

DncParamsT<nn::Var> lift_params(nn::Tape& tape, const DncParams& params) {
  DncParamsT<nn::Var> out;
  auto lift_layer = [&](const LstmLayer<nn::Mat>& l) {
    return LstmLayer<nn::Var>{tape.leaf(l.w_x, true), tape.leaf(l.w_h, true),
                              tape.leaf(l.b, true), tape.leaf(l.ln_gain, true)};
  };
  for (const auto& l : params.fwd) out.fwd.push_back(lift_layer(l));
  for (const auto& l : params.bwd) out.bwd.push_back(lift_layer(l));
  out.w_ctrl = tape.leaf(params.w_ctrl, true);
  out.b_ctrl = tape.leaf(params.b_ctrl, true);
  out.w_iface = tape.leaf(params.w_iface, true);
  out.b_iface = tape.leaf(params.b_iface, true);
  out.w_v = tape.leaf(params.w_v, true);
  out.w_mu = tape.leaf(params.w_mu, true);
  out.b = tape.leaf(params.b, true);
  return out;
}

int64_t count_params(const DncParams& params) {
  int64_t n = 0;
  for_each_param(params, [&](const std::string&, const nn::Mat& m) { n += m.size(); });
  return n;
}

}  // namespace dnclab::dnc
