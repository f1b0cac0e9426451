#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "dnclab/corpus/types.hpp"

namespace dnclab::corpus {

// Lexicographically ordered vocabulary. Always contains the three symbols
// '?', '.', '-'; '-' marks the positions where answers are required.
class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> sorted_tokens);

  int index_of(const std::string& token) const;  // throws on unknown token
  bool contains(const std::string& token) const;
  const std::string& token(int index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  int size() const { return int(tokens_.size()); }
  int blank() const { return blank_; }  // index of '-'

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int blank_ = -1;
};

// Union of all sentence tokens and answer words across the corpus, plus the
// three symbols, in lexicographic order. Empty corpus is an error.
Vocab build_vocab(const std::vector<Story>& stories);

Vocab vocab_from_json(const std::string& json_text);
std::string vocab_to_json(const Vocab& vocab);

}  // namespace dnclab::corpus
