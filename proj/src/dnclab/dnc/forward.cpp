#include "dnclab/dnc/forward.hpp"

namespace dnclab::dnc {

ForwardResult forward(const DncParams& params, const DncConfig& config,
                      const corpus::EncodedSequence& sequence, bool record_trace) {
  ForwardResult out;
  Trace* trace = record_trace ? &out.trace : nullptr;
  out.logits = run_dnc(params, config, sequence.token_ids, trace);
  for (size_t t = 0; t < sequence.token_ids.size(); ++t)
    if (sequence.answer_mask[t]) out.predictions.push_back(nn::argmax(out.logits[t]));
  if (record_trace) {
    out.trace.token_ids = sequence.token_ids;
    out.trace.segment_tags = sequence.segment_tags;
    out.has_trace = true;
  }
  return out;
}

}  // namespace dnclab::dnc
