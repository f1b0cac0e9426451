#include "dnclab/probe/signals.hpp"

#include <stdexcept>

#include "json.hpp"

namespace dnclab::probe {

bool is_gate(SignalKind kind) {
  return kind == SignalKind::free_gate || kind == SignalKind::allocation_gate ||
         kind == SignalKind::write_gate;
}

std::string signal_label(SignalKind kind, int head) {
  switch (kind) {
    case SignalKind::write_key: return "write_key";
    case SignalKind::read_keys: return "read_keys";
    case SignalKind::write_vector: return "write_vector";
    case SignalKind::erase_vector: return "erase_vector";
    case SignalKind::free_gate: return "free_gate[" + std::to_string(head) + "]";
    case SignalKind::allocation_gate: return "allocation_gate";
    case SignalKind::write_gate: return "write_gate";
  }
  throw std::logic_error("signal_label");
}

std::vector<SignalSeries> extract_series(const dnc::Trace& trace) {
  std::vector<SignalSeries> out;
  if (trace.steps.empty()) return out;
  const int read_heads = trace.steps[0].signals.read_keys.rows;

  auto series = [&](SignalKind kind, int head, auto&& value_of) {
    SignalSeries s;
    s.kind = kind;
    s.head = head;
    s.segments = trace.segment_tags;
    for (const dnc::TraceStep& step : trace.steps) s.values.push_back(value_of(step));
    out.push_back(std::move(s));
  };

  series(SignalKind::write_key, -1,
         [](const dnc::TraceStep& s) { return s.signals.write_key; });
  series(SignalKind::read_keys, -1, [](const dnc::TraceStep& s) {
    // heads concatenated into one R*W vector per step
    nn::Mat v(s.signals.read_keys.rows * s.signals.read_keys.cols, 1);
    for (int i = 0; i < v.rows; ++i) v[i] = s.signals.read_keys.a[size_t(i)];
    return v;
  });
  series(SignalKind::write_vector, -1,
         [](const dnc::TraceStep& s) { return s.signals.write_vector; });
  series(SignalKind::erase_vector, -1,
         [](const dnc::TraceStep& s) { return s.signals.erase_vector; });
  for (int r = 0; r < read_heads; ++r)
    series(SignalKind::free_gate, r,
           [r](const dnc::TraceStep& s) { return nn::Mat::scalar(s.signals.free_gates[r]); });
  series(SignalKind::allocation_gate, -1,
         [](const dnc::TraceStep& s) { return nn::Mat::scalar(s.signals.allocation_gate); });
  series(SignalKind::write_gate, -1,
         [](const dnc::TraceStep& s) { return nn::Mat::scalar(s.signals.write_gate); });
  return out;
}

namespace {

nlohmann::json mat_to_json(const nn::Mat& m) {
  nlohmann::json js;
  js["rows"] = m.rows;
  js["cols"] = m.cols;
  js["data"] = m.a;
  return js;
}

nn::Mat mat_from_json(const nlohmann::json& js) {
  nn::Mat m(js.at("rows").get<int>(), js.at("cols").get<int>());
  m.a = js.at("data").get<std::vector<double>>();
  if (int(m.a.size()) != m.rows * m.cols) throw std::runtime_error("trace: bad matrix payload");
  return m;
}

}  // namespace

std::string trace_to_json(const dnc::Trace& trace, const std::string& config_hash) {
  nlohmann::json js;
  js["config_hash"] = config_hash;
  js["token_ids"] = trace.token_ids;
  std::vector<std::string> tags;
  for (corpus::Segment s : trace.segment_tags) tags.push_back(corpus::segment_name(s));
  js["segment_tags"] = tags;
  js["steps"] = nlohmann::json::array();
  for (const dnc::TraceStep& step : trace.steps) {
    nlohmann::json sj;
    sj["read_keys"] = mat_to_json(step.signals.read_keys);
    sj["read_strengths"] = mat_to_json(step.signals.read_strengths);
    sj["write_key"] = mat_to_json(step.signals.write_key);
    sj["write_strength"] = step.signals.write_strength;
    sj["erase_vector"] = mat_to_json(step.signals.erase_vector);
    sj["write_vector"] = mat_to_json(step.signals.write_vector);
    sj["free_gates"] = mat_to_json(step.signals.free_gates);
    sj["allocation_gate"] = step.signals.allocation_gate;
    sj["write_gate"] = step.signals.write_gate;
    sj["write_weighting"] = mat_to_json(step.write_weighting);
    sj["read_weightings"] = nlohmann::json::array();
    for (const nn::Mat& w : step.read_weightings) sj["read_weightings"].push_back(mat_to_json(w));
    sj["read_vectors"] = mat_to_json(step.read_vectors);
    sj["logits"] = mat_to_json(step.logits);
    js["steps"].push_back(std::move(sj));
  }
  return js.dump() + "\n";
}

dnc::Trace trace_from_json(const std::string& json_text, std::string* config_hash) {
  const auto js = nlohmann::json::parse(json_text);
  if (config_hash) *config_hash = js.at("config_hash").get<std::string>();
  dnc::Trace trace;
  trace.token_ids = js.at("token_ids").get<std::vector<int>>();
  for (const auto& tag : js.at("segment_tags")) {
    const std::string name = tag.get<std::string>();
    if (name == "story") trace.segment_tags.push_back(corpus::Segment::story);
    else if (name == "adversary") trace.segment_tags.push_back(corpus::Segment::adversary);
    else if (name == "question") trace.segment_tags.push_back(corpus::Segment::question);
    else throw std::runtime_error("trace: unknown segment tag " + name);
  }
  for (const auto& sj : js.at("steps")) {
    dnc::TraceStep step;
    step.signals.read_keys = mat_from_json(sj.at("read_keys"));
    step.signals.read_strengths = mat_from_json(sj.at("read_strengths"));
    step.signals.write_key = mat_from_json(sj.at("write_key"));
    step.signals.write_strength = sj.at("write_strength").get<double>();
    step.signals.erase_vector = mat_from_json(sj.at("erase_vector"));
    step.signals.write_vector = mat_from_json(sj.at("write_vector"));
    step.signals.free_gates = mat_from_json(sj.at("free_gates"));
    step.signals.allocation_gate = sj.at("allocation_gate").get<double>();
    step.signals.write_gate = sj.at("write_gate").get<double>();
    step.write_weighting = mat_from_json(sj.at("write_weighting"));
    for (const auto& wj : sj.at("read_weightings"))
      step.read_weightings.push_back(mat_from_json(wj));
    step.read_vectors = mat_from_json(sj.at("read_vectors"));
    step.logits = mat_from_json(sj.at("logits"));
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace dnclab::probe
