#pragma once

#include "dnclab/metamorph/attack.hpp"
#include "dnclab/probe/compare.hpp"

namespace dnclab::probe {

struct TripleSearchConfig {
  int max_uaa_attempts = 64;       // Pick-n-Plug draws before giving up on a UAA
  int slot_count = 4;              // class-member slots to brute force
  uint64_t max_saa_candidates = 0; // 0: exhaust the whole permutation space
};

// Closely related clean / unsuccessful / successful inputs plus their
// traces. `found` is false (with a status) when the search budget runs out;
// that is an expected outcome, not an error.
struct TripleResult {
  bool found = false;
  std::string status;  // "ok" | "no_correct_clean" | "no_uaa" | "no_saa"
  corpus::Story ce_story, uaa_story, saa_story;
  corpus::EncodedSequence ce_seq, uaa_seq, saa_seq;
  dnc::Trace ce, uaa, saa;
  uint64_t saa_candidates_tried = 0;
};

// true iff every answer-slot prediction is correct
using Predictor = std::function<bool(const corpus::EncodedSequence&)>;
using Tracer = std::function<dnc::Trace(const corpus::EncodedSequence&)>;

// Sample a UAA from Pick-n-Plug runs on a correctly predicted target story,
// then brute-force same-class word substitutions over `slot_count` slots of
// its adversarial block until the model's answer breaks (the SAA). The CE
// is the same story with the block removed. Story and question tokens are
// identical across the three; the UAA/SAA adversary segments differ only at
// the permuted slots.
TripleResult find_triple(const dnc::DncParams& params, const dnc::DncConfig& config,
                         const std::vector<corpus::Story>& target_stories,
                         const meta::AttackSpec& spec,
                         const std::vector<corpus::Story>& source_stories,
                         const std::vector<meta::SynonymClass>& classes,
                         const TripleSearchConfig& search, const corpus::Vocab& vocab,
                         nn::Rng& rng);

// Same search against an arbitrary predictor (the seam the degenerate-model
// tests use).
TripleResult find_triple_with(const Predictor& predicts_correctly, const Tracer& record_trace,
                              const std::vector<corpus::Story>& target_stories,
                              const meta::AttackSpec& spec,
                              const std::vector<corpus::Story>& source_stories,
                              const std::vector<meta::SynonymClass>& classes,
                              const TripleSearchConfig& search, const corpus::Vocab& vocab,
                              nn::Rng& rng);

// Time steps at which two equal-length encoded sequences disagree.
std::vector<int> differing_steps(const corpus::EncodedSequence& a,
                                 const corpus::EncodedSequence& b);

}  // namespace dnclab::probe
