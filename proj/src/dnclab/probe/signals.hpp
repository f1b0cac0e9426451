#pragma once

#include <string>
#include <vector>

#include "dnclab/dnc/forward.hpp"

namespace dnclab::probe {

enum class SignalKind {
  write_key,
  read_keys,  // concatenated across heads
  write_vector,
  erase_vector,
  free_gate,  // one series per head
  allocation_gate,
  write_gate,
};

bool is_gate(SignalKind kind);
std::string signal_label(SignalKind kind, int head = -1);

// One control signal over time: a vector per step for keys/vectors, a 1x1
// per step for gates, with the segment tag of each step alongside.
struct SignalSeries {
  SignalKind kind = SignalKind::write_key;
  int head = -1;  // used by free_gate
  std::vector<nn::Mat> values;
  std::vector<corpus::Segment> segments;

  std::string label() const { return signal_label(kind, head); }
};

// One series per vector signal plus R free-gate series and the two scalar
// gates. Series lengths equal the trace length.
std::vector<SignalSeries> extract_series(const dnc::Trace& trace);

// Trace persistence (JSON): config hash, token ids, segment tags, per-step
// signals.
std::string trace_to_json(const dnc::Trace& trace, const std::string& config_hash);
dnc::Trace trace_from_json(const std::string& json_text, std::string* config_hash = nullptr);

}  // namespace dnclab::probe
