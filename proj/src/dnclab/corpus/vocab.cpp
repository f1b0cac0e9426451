#include "dnclab/corpus/vocab.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace dnclab::corpus {

Vocab::Vocab(std::vector<std::string> sorted_tokens) : tokens_(std::move(sorted_tokens)) {
  for (int i = 0; i < int(tokens_.size()); ++i) {
    if (!index_.emplace(tokens_[i], i).second)
      throw std::invalid_argument("vocab: duplicate token '" + tokens_[i] + "'");
  }
  auto it = index_.find("-");
  blank_ = it == index_.end() ? -1 : it->second;
}

int Vocab::index_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw std::out_of_range("token not in vocabulary: '" + token + "'");
  return it->second;
}

bool Vocab::contains(const std::string& token) const { return index_.count(token) > 0; }

Vocab build_vocab(const std::vector<Story>& stories) {
  if (stories.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  std::set<std::string> words = {"?", ".", "-"};
  for (const Story& story : stories) {
    for (const Sentence& s : story.sentences) {
      words.insert(s.tokens.begin(), s.tokens.end());
      words.insert(s.answers.begin(), s.answers.end());
    }
  }
  return Vocab(std::vector<std::string>(words.begin(), words.end()));
}

Vocab vocab_from_json(const std::string& json_text) {
  auto js = nlohmann::json::parse(json_text);
  return Vocab(js.at("tokens").get<std::vector<std::string>>());
}

std::string vocab_to_json(const Vocab& vocab) {
  nlohmann::json js;
  js["tokens"] = vocab.tokens();
  return js.dump(2) + "\n";
}

}  // namespace dnclab::corpus
