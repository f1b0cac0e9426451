#pragma once

#include <string>
#include <vector>

namespace dnclab::corpus {

enum class SentenceKind { statement, question };

struct Sentence {
  std::vector<std::string> tokens;  // ends in "." or "?"
  SentenceKind kind = SentenceKind::statement;
  std::vector<std::string> answers;  // non-empty iff question
  bool adversarial = false;          // set by metamorph::plug
};

struct Story {
  std::string task_id;  // "1".."20" for bAbI, or a synthetic tag
  std::vector<Sentence> sentences;
};

enum class Segment { story, adversary, question };

// One-hot-ready encoding of a story: token ids plus the answer-slot mask,
// aligned targets, and per-position segment tags.
struct EncodedSequence {
  std::vector<int> token_ids;
  std::vector<char> answer_mask;       // true exactly at '-' positions
  std::vector<int> targets;            // one per masked position, in order
  std::vector<Segment> segment_tags;
};

inline const char* segment_name(Segment s) {
  switch (s) {
    case Segment::story: return "story";
    case Segment::adversary: return "adversary";
    case Segment::question: return "question";
  }
  return "?";
}

}  // namespace dnclab::corpus
