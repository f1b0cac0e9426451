#pragma once

#include <string>

namespace dnclab::dnc {

// Architecture hyperparameters. The interface width is fully determined by
// (R, W): R*W read keys + R read strengths + write key (W) + write strength
// + erase vector (W) + write vector (W) + R free gates + allocation gate +
// write gate = R*W + 3W + 2R + 3.
struct DncConfig {
  int input_size = 0;     // X: one-hot width = vocabulary size
  int output_size = 0;    // Y
  int memory_rows = 192;  // N
  int memory_width = 32;  // W
  int read_heads = 4;     // R
  int ctrl_output = 64;   // C
  int hidden = 64;        // controller hidden size per layer and direction
  int layers = 1;
  bool bidirectional = true;
  bool layer_norm = true;  // normalize LSTM pre-activations, as in the robust DNC variants

  int read_concat() const { return read_heads * memory_width; }  // P
  int interface_size() const {
    return read_heads * memory_width + 3 * memory_width + 2 * read_heads + 3;
  }
  int ctrl_feature() const { return hidden * (bidirectional ? 2 : 1); }

  void validate() const;
  bool operator==(const DncConfig&) const = default;
};

// Same controller, different memory row count: N' = round(factor * N).
// Parameter shapes do not depend on N, so any checkpoint stays loadable.
DncConfig resize_memory(const DncConfig& config, double factor);

std::string config_to_json(const DncConfig& config);
DncConfig config_from_json(const std::string& json_text);

}  // namespace dnclab::dnc
