#include "dnclab/probe/triple.hpp"

#include <stdexcept>

namespace dnclab::probe {

TripleResult find_triple_with(const Predictor& predicts_correctly, const Tracer& record_trace,
                              const std::vector<corpus::Story>& target_stories,
                              const meta::AttackSpec& spec,
                              const std::vector<corpus::Story>& source_stories,
                              const std::vector<meta::SynonymClass>& classes,
                              const TripleSearchConfig& search, const corpus::Vocab& vocab,
                              nn::Rng& rng) {
  TripleResult out;

  // the CE must be answered correctly before an attack means anything
  std::vector<int> order(target_stories.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  rng.shuffle(order);
  int clean_idx = -1;
  for (int idx : order) {
    if (predicts_correctly(corpus::encode(target_stories[idx], vocab))) {
      clean_idx = idx;
      break;
    }
  }
  if (clean_idx < 0) {
    out.status = "no_correct_clean";
    return out;
  }
  const corpus::Story& target = target_stories[clean_idx];

  // UAA: a Pick-n-Plug attack the model shrugs off
  meta::AttackSpec plain = spec;
  plain.permute_classes.clear();
  meta::TransformResult uaa;
  bool have_uaa = false;
  for (int attempt = 0; attempt < search.max_uaa_attempts && !have_uaa; ++attempt) {
    meta::TransformResult t = meta::transform(target, plain, source_stories, classes, vocab, rng);
    if (predicts_correctly(t.sequence)) {
      uaa = std::move(t);
      have_uaa = true;
    }
  }
  if (!have_uaa) {
    out.status = "no_uaa";
    return out;
  }

  // SAA: brute-force same-class substitutions over the designated slots
  const auto slots = meta::class_slots(uaa.block, classes, search.slot_count);
  meta::PermutationEnumerator candidates(uaa.block, classes, slots);
  const uint64_t budget = search.max_saa_candidates > 0
                              ? std::min(search.max_saa_candidates, candidates.total())
                              : candidates.total();
  bool have_saa = false;
  corpus::Story saa_story;
  corpus::EncodedSequence saa_seq;
  for (uint64_t i = 0; i < budget && !have_saa; ++i) {
    ++out.saa_candidates_tried;
    const meta::AdversarialBlock block = candidates.at(i);
    corpus::Story story = meta::plug(target, block, spec.position, spec.first_question_only);
    corpus::EncodedSequence seq = corpus::encode(story, vocab);
    if (!predicts_correctly(seq)) {
      saa_story = std::move(story);
      saa_seq = std::move(seq);
      have_saa = true;
    }
  }
  if (!have_saa) {
    out.status = "no_saa";
    return out;
  }

  out.found = true;
  out.status = "ok";
  out.ce_story = target;
  out.uaa_story = uaa.story;
  out.saa_story = std::move(saa_story);
  out.ce_seq = corpus::encode(target, vocab);
  out.uaa_seq = uaa.sequence;
  out.saa_seq = std::move(saa_seq);
  out.ce = record_trace(out.ce_seq);
  out.uaa = record_trace(out.uaa_seq);
  out.saa = record_trace(out.saa_seq);
  return out;
}

TripleResult find_triple(const dnc::DncParams& params, const dnc::DncConfig& config,
                         const std::vector<corpus::Story>& target_stories,
                         const meta::AttackSpec& spec,
                         const std::vector<corpus::Story>& source_stories,
                         const std::vector<meta::SynonymClass>& classes,
                         const TripleSearchConfig& search, const corpus::Vocab& vocab,
                         nn::Rng& rng) {
  Predictor predicts = [&](const corpus::EncodedSequence& seq) {
    const auto result = dnc::forward(params, config, seq);
    for (size_t i = 0; i < seq.targets.size(); ++i)
      if (result.predictions[i] != seq.targets[i]) return false;
    return true;
  };
  Tracer tracer = [&](const corpus::EncodedSequence& seq) {
    return dnc::forward(params, config, seq, true).trace;
  };
  return find_triple_with(predicts, tracer, target_stories, spec, source_stories, classes, search,
                          vocab, rng);
}

std::vector<int> differing_steps(const corpus::EncodedSequence& a,
                                 const corpus::EncodedSequence& b) {
  if (a.token_ids.size() != b.token_ids.size())
    throw std::invalid_argument("differing_steps: sequences have different lengths");
  std::vector<int> steps;
  for (size_t t = 0; t < a.token_ids.size(); ++t)
    if (a.token_ids[t] != b.token_ids[t]) steps.push_back(int(t));
  return steps;
}

}  // namespace dnclab::probe
