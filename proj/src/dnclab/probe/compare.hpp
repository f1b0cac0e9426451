#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dnclab/probe/signals.hpp"

namespace dnclab::probe {

// epsilon used for both the cosine norm guard and KL smoothing
inline constexpr double kProbeEps = 1e-8;

struct CosineResult {
  std::vector<double> per_step;
  double mean = 0.0;
};

// Per-step cosine similarity between two aligned vector series, restricted
// to steps tagged with `segment`, plus the unweighted mean over them.
// Mismatched segment lengths are an alignment error.
CosineResult cosine_series(const SignalSeries& a, const SignalSeries& b, corpus::Segment segment);

// Normalized KL-divergence of two gate series over a segment: each sequence
// is normalized into a distribution over the segment's steps,
// p_t = (a_t + eps) / sum_j (a_j + eps), and KL(p||q) = sum p ln(p/q) is
// returned in both directions (it is not symmetric). Empty segment errors.
std::pair<double, double> kl_series(const SignalSeries& a, const SignalSeries& b,
                                    corpus::Segment segment);

struct VectorEntry {
  std::string pair;     // "CE-UAA" | "CE-SAA" | "UAA-SAA"
  std::string segment;  // "story" | "adversary" | "question"
  std::string signal;
  double mean_cosine = 0.0;
  std::vector<double> per_step;
};

struct GateEntry {
  std::string pair;
  std::string segment;
  std::string signal;
  double kl_forward = 0.0;   // KL(first || second)
  double kl_backward = 0.0;  // KL(second || first)
};

// Every (pair, segment, signal) cell; adversary cells are absent for the
// CE pairs because a clean example has no adversary segment.
struct ComparisonReport {
  std::vector<VectorEntry> cosines;
  std::vector<GateEntry> kls;
};

ComparisonReport compare(const dnc::Trace& ce, const dnc::Trace& uaa, const dnc::Trace& saa);

std::string comparison_to_json(const ComparisonReport& report);

}  // namespace dnclab::probe
