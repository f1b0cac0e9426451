#include "dnclab/probe/compare.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace dnclab::probe {

namespace {

std::vector<const nn::Mat*> segment_values(const SignalSeries& s, corpus::Segment segment) {
  std::vector<const nn::Mat*> out;
  for (size_t t = 0; t < s.values.size(); ++t)
    if (s.segments[t] == segment) out.push_back(&s.values[t]);
  return out;
}

}  // namespace

CosineResult cosine_series(const SignalSeries& a, const SignalSeries& b, corpus::Segment segment) {
  if (a.kind != b.kind || a.head != b.head)
    throw std::invalid_argument("cosine_series: different signal kinds");
  const auto va = segment_values(a, segment);
  const auto vb = segment_values(b, segment);
  if (va.size() != vb.size())
    throw std::invalid_argument("cosine_series: misaligned segment (" + std::to_string(va.size()) +
                                " vs " + std::to_string(vb.size()) + " steps)");
  if (va.empty()) throw std::invalid_argument("cosine_series: empty segment");

  CosineResult out;
  double total = 0.0;
  for (size_t t = 0; t < va.size(); ++t) {
    const nn::Mat& x = *va[t];
    const nn::Mat& y = *vb[t];
    if (!x.same_shape(y)) throw std::invalid_argument("cosine_series: vector size mismatch");
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      xy += x[i] * y[i];
      xx += x[i] * x[i];
      yy += y[i] * y[i];
    }
    // floor, not additive: identical vectors must compare as exactly 1
    const double c = xy / std::max(std::sqrt(xx) * std::sqrt(yy), kProbeEps);
    out.per_step.push_back(c);
    total += c;
  }
  out.mean = total / double(out.per_step.size());
  return out;
}

std::pair<double, double> kl_series(const SignalSeries& a, const SignalSeries& b,
                                    corpus::Segment segment) {
  if (!is_gate(a.kind) || a.kind != b.kind || a.head != b.head)
    throw std::invalid_argument("kl_series: need matching gate series");
  const auto va = segment_values(a, segment);
  const auto vb = segment_values(b, segment);
  if (va.size() != vb.size()) throw std::invalid_argument("kl_series: misaligned segment");
  if (va.empty()) throw std::invalid_argument("kl_series: empty segment");

  const size_t n = va.size();
  std::vector<double> p(n), q(n);
  double sp = 0.0, sq = 0.0;
  for (size_t t = 0; t < n; ++t) {
    p[t] = va[t]->item() + kProbeEps;
    q[t] = vb[t]->item() + kProbeEps;
    sp += p[t];
    sq += q[t];
  }
  double kl_pq = 0.0, kl_qp = 0.0;
  for (size_t t = 0; t < n; ++t) {
    p[t] /= sp;
    q[t] /= sq;
    kl_pq += p[t] * std::log(p[t] / q[t]);
    kl_qp += q[t] * std::log(q[t] / p[t]);
  }
  return {kl_pq, kl_qp};
}

ComparisonReport compare(const dnc::Trace& ce, const dnc::Trace& uaa, const dnc::Trace& saa) {
  const auto ce_series = extract_series(ce);
  const auto uaa_series = extract_series(uaa);
  const auto saa_series = extract_series(saa);
  if (ce_series.size() != uaa_series.size() || uaa_series.size() != saa_series.size())
    throw std::invalid_argument("compare: traces expose different signal sets");

  struct Pair {
    const char* name;
    const std::vector<SignalSeries>* first;
    const std::vector<SignalSeries>* second;
    bool has_adversary;
  };
  const Pair pairs[] = {{"CE-UAA", &ce_series, &uaa_series, false},
                        {"CE-SAA", &ce_series, &saa_series, false},
                        {"UAA-SAA", &uaa_series, &saa_series, true}};
  const std::pair<corpus::Segment, const char*> segments[] = {
      {corpus::Segment::story, "story"},
      {corpus::Segment::adversary, "adversary"},
      {corpus::Segment::question, "question"}};

  auto segment_present = [](const std::vector<SignalSeries>& series, corpus::Segment seg) {
    if (series.empty()) return false;
    for (corpus::Segment s : series[0].segments)
      if (s == seg) return true;
    return false;
  };

  ComparisonReport report;
  for (const Pair& pair : pairs) {
    for (const auto& [segment, segment_str] : segments) {
      if (segment == corpus::Segment::adversary && !pair.has_adversary) continue;
      if (!segment_present(*pair.first, segment) && !segment_present(*pair.second, segment))
        continue;
      for (size_t i = 0; i < pair.first->size(); ++i) {
        const SignalSeries& a = (*pair.first)[i];
        const SignalSeries& b = (*pair.second)[i];
        if (is_gate(a.kind)) {
          const auto [kl_ab, kl_ba] = kl_series(a, b, segment);
          report.kls.push_back({pair.name, segment_str, a.label(), kl_ab, kl_ba});
        } else {
          CosineResult c = cosine_series(a, b, segment);
          report.cosines.push_back(
              {pair.name, segment_str, a.label(), c.mean, std::move(c.per_step)});
        }
      }
    }
  }
  return report;
}

std::string comparison_to_json(const ComparisonReport& report) {
  nlohmann::json js;
  js["cosines"] = nlohmann::json::array();
  for (const VectorEntry& e : report.cosines)
    js["cosines"].push_back({{"pair", e.pair},
                             {"segment", e.segment},
                             {"signal", e.signal},
                             {"mean_cosine", e.mean_cosine},
                             {"per_step", e.per_step}});
  js["kls"] = nlohmann::json::array();
  for (const GateEntry& e : report.kls)
    js["kls"].push_back({{"pair", e.pair},
                         {"segment", e.segment},
                         {"signal", e.signal},
                         {"kl_forward", e.kl_forward},
                         {"kl_backward", e.kl_backward}});
  return js.dump(2) + "\n";
}

}  // namespace dnclab::probe
