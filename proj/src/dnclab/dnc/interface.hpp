#pragma once

#include <stdexcept>
#include <vector>

#include "dnclab/dnc/config.hpp"
#include "dnclab/dnc/ops.hpp"

namespace dnclab::dnc {

// Slot offsets of the raw interface vector, in declared order. This layout
// is part of the checkpoint contract (see docs/checkpoint_format.md).
struct InterfaceLayout {
  int read_keys;       // R*W values, head-major
  int read_strengths;  // R
  int write_key;       // W
  int write_strength;  // 1
  int erase_vector;    // W
  int write_vector;    // W
  int free_gates;      // R
  int allocation_gate; // 1
  int write_gate;      // 1
  int total;
};

inline InterfaceLayout interface_layout(const DncConfig& c) {
  InterfaceLayout l{};
  int off = 0;
  l.read_keys = off; off += c.read_heads * c.memory_width;
  l.read_strengths = off; off += c.read_heads;
  l.write_key = off; off += c.memory_width;
  l.write_strength = off; off += 1;
  l.erase_vector = off; off += c.memory_width;
  l.write_vector = off; off += c.memory_width;
  l.free_gates = off; off += c.read_heads;
  l.allocation_gate = off; off += 1;
  l.write_gate = off; off += 1;
  l.total = off;
  return l;
}

// Parsed control signals. Gates and the erase vector are squashed to [0,1]
// by the logistic; strengths go through oneplus = 1 + softplus onto [1,inf);
// keys and the write vector pass through unchanged.
template <class V>
struct ControlSignals {
  std::vector<V> read_keys;  // R of W x 1
  V read_strengths;          // R x 1
  V write_key;               // W x 1
  V write_strength;          // 1 x 1
  V erase_vector;            // W x 1
  V write_vector;            // W x 1
  V free_gates;              // R x 1
  V allocation_gate;         // 1 x 1
  V write_gate;              // 1 x 1
};

template <class V>
V oneplus(const V& x) {
  return addc(softplus(x), 1.0);
}

template <class V>
ControlSignals<V> parse_interface(const V& raw, const DncConfig& config) {
  const InterfaceLayout l = interface_layout(config);
  const nn::Mat& rv = values(raw);
  if (!rv.is_colvec() || rv.rows != l.total)
    throw std::invalid_argument("parse_interface: expected " + std::to_string(l.total) +
                                " slots, got " + std::to_string(rv.rows));
  ControlSignals<V> s;
  for (int r = 0; r < config.read_heads; ++r)
    s.read_keys.push_back(slice(raw, l.read_keys + r * config.memory_width, config.memory_width));
  s.read_strengths = oneplus(slice(raw, l.read_strengths, config.read_heads));
  s.write_key = slice(raw, l.write_key, config.memory_width);
  s.write_strength = oneplus(slice(raw, l.write_strength, 1));
  s.erase_vector = sigmoid(slice(raw, l.erase_vector, config.memory_width));
  s.write_vector = slice(raw, l.write_vector, config.memory_width);
  s.free_gates = sigmoid(slice(raw, l.free_gates, config.read_heads));
  s.allocation_gate = sigmoid(slice(raw, l.allocation_gate, 1));
  s.write_gate = sigmoid(slice(raw, l.write_gate, 1));
  return s;
}

}  // namespace dnclab::dnc
