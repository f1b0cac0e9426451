#pragma once

#include <vector>

#include "dnclab/corpus/types.hpp"
#include "dnclab/corpus/vocab.hpp"

namespace dnclab::corpus {

// Statements are emitted verbatim; each question is followed by one '-'
// token per gold answer word, with the targets aligned to those positions.
// Question sentences and their '-' slots are tagged Segment::question;
// sentences flagged adversarial are tagged Segment::adversary; everything
// else is Segment::story. Out-of-vocabulary tokens raise std::out_of_range.
EncodedSequence encode(const Story& story, const Vocab& vocab);

// Inverse of the token stream part of encode (answers appear as '-').
std::vector<std::string> decode(const std::vector<int>& token_ids, const Vocab& vocab);

// Word error rate: fraction of answer positions predicted incorrectly.
double wer(const std::vector<int>& predicted, const std::vector<int>& targets);

}  // namespace dnclab::corpus
