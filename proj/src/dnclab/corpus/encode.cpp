#include "dnclab/corpus/encode.hpp"

#include <stdexcept>

namespace dnclab::corpus {

EncodedSequence encode(const Story& story, const Vocab& vocab) {
  EncodedSequence seq;
  const int blank = vocab.index_of("-");
  for (const Sentence& s : story.sentences) {
    const bool is_q = s.kind == SentenceKind::question;
    const Segment tag = is_q ? Segment::question
                             : (s.adversarial ? Segment::adversary : Segment::story);
    for (const std::string& tok : s.tokens) {
      seq.token_ids.push_back(vocab.index_of(tok));
      seq.answer_mask.push_back(false);
      seq.segment_tags.push_back(tag);
    }
    if (is_q) {
      for (const std::string& ans : s.answers) {
        seq.token_ids.push_back(blank);
        seq.answer_mask.push_back(true);
        seq.targets.push_back(vocab.index_of(ans));
        seq.segment_tags.push_back(Segment::question);
      }
    }
  }
  return seq;
}

std::vector<std::string> decode(const std::vector<int>& token_ids, const Vocab& vocab) {
  std::vector<std::string> out;
  out.reserve(token_ids.size());
  for (int id : token_ids) out.push_back(vocab.token(id));
  return out;
}

double wer(const std::vector<int>& predicted, const std::vector<int>& targets) {
  if (targets.empty()) throw std::invalid_argument("wer: no answers");
  if (predicted.size() != targets.size()) throw std::invalid_argument("wer: length mismatch");
  size_t wrong = 0;
  for (size_t i = 0; i < targets.size(); ++i)
    if (predicted[i] != targets[i]) ++wrong;
  return double(wrong) / double(targets.size());
}

}  // namespace dnclab::corpus
