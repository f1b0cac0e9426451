#pragma once

#include <string>
#include <vector>

#include "dnclab/corpus/types.hpp"

namespace dnclab::corpus {

// Parse bAbI v1.2 plain text: one numbered line per sentence, line number 1
// starts a new story, questions carry tab-separated answer and
// supporting-fact ids (the latter are discarded). Tokens are lowercased,
// digits removed, '.' and '?' split into their own tokens, comma-separated
// answers split into one answer token each. Malformed lines raise
// std::runtime_error naming the offending line.
std::vector<Story> parse_babi(const std::string& raw_text, const std::string& task_id = "");

// Render stories back to bAbI line format (support ids are gone; answers
// are rejoined with commas). parse_babi(to_babi_text(s)) == s.
std::string to_babi_text(const std::vector<Story>& stories);

// Canonical JSON story format shared by all tools:
//   [{"task_id":..., "sentences":[{"tokens":[...],"kind":"statement"|"question",
//     "answers":[...], "adversarial":true (only when set)}]}]
std::string stories_to_json(const std::vector<Story>& stories);
std::vector<Story> stories_from_json(const std::string& json_text);

}  // namespace dnclab::corpus
