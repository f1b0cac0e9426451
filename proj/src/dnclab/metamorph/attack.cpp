#include "dnclab/metamorph/attack.hpp"

#include <algorithm>
#include <stdexcept>

#include "dnclab/corpus/synth.hpp"
#include "json.hpp"

namespace dnclab::meta {

namespace {

std::vector<corpus::Sentence> statements_of(const corpus::Story& story) {
  std::vector<corpus::Sentence> out;
  for (const corpus::Sentence& s : story.sentences)
    if (s.kind == corpus::SentenceKind::statement) out.push_back(s);
  return out;
}

int find_class(const std::vector<SynonymClass>& classes, const std::string& word) {
  for (size_t i = 0; i < classes.size(); ++i)
    for (const std::string& m : classes[i].members)
      if (m == word) return int(i);
  return -1;
}

}  // namespace

std::string position_name(Position p) {
  switch (p) {
    case Position::before_story: return "before_story";
    case Position::before_question: return "before_question";
    case Position::both: return "both";
  }
  throw std::logic_error("position_name");
}

Position position_from_name(const std::string& name) {
  if (name == "before_story") return Position::before_story;
  if (name == "before_question") return Position::before_question;
  if (name == "both") return Position::both;
  throw std::invalid_argument("unknown position: " + name);
}

void AttackSpec::validate() const {
  if (full_block == (num_sentences >= 1))
    throw std::invalid_argument("attack spec: set exactly one of num_sentences, full_block");
  if (source_task == target_task)
    throw std::invalid_argument("attack spec: source and target must differ");
}

std::string attack_spec_to_json(const AttackSpec& spec) {
  nlohmann::json js;
  js["target_task"] = spec.target_task;
  js["source_task"] = spec.source_task;
  js["position"] = position_name(spec.position);
  if (spec.full_block)
    js["full_block"] = true;
  else
    js["num_sentences"] = spec.num_sentences;
  js["seed"] = spec.seed;
  js["permute_classes"] = spec.permute_classes;
  js["first_question_only"] = spec.first_question_only;
  return js.dump(2) + "\n";
}

AttackSpec attack_spec_from_json(const std::string& json_text) {
  const auto js = nlohmann::json::parse(json_text);
  AttackSpec spec;
  spec.target_task = js.at("target_task").get<std::string>();
  spec.source_task = js.at("source_task").get<std::string>();
  spec.position = position_from_name(js.at("position").get<std::string>());
  spec.full_block = js.value("full_block", false);
  spec.num_sentences = js.value("num_sentences", 0);
  spec.seed = js.value("seed", uint64_t(0));
  if (js.contains("permute_classes"))
    spec.permute_classes = js.at("permute_classes").get<std::vector<std::string>>();
  spec.first_question_only = js.value("first_question_only", false);
  spec.validate();
  return spec;
}

CompatibilityTable CompatibilityTable::defaults() {
  CompatibilityTable t;
  const std::vector<std::string> babi = {"3", "15", "16", "19"};
  for (const auto& s : babi)
    for (const auto& d : babi)
      if (s != d) t.allow(s, d);
  const std::vector<std::string> synth = {"movement", "direction-graph", "deduction", "induction"};
  for (const auto& s : synth)
    for (const auto& d : synth)
      if (s != d) t.allow(s, d);
  return t;
}

CompatibilityTable CompatibilityTable::from_json(const std::string& json_text) {
  CompatibilityTable t;
  const auto js = nlohmann::json::parse(json_text);
  for (const auto& [source, targets] : js.items())
    for (const auto& target : targets) t.allow(source, target.get<std::string>());
  return t;
}

std::string CompatibilityTable::to_json() const {
  nlohmann::json js = nlohmann::json::object();
  for (const auto& [source, targets] : targets_by_source_)
    js[source] = std::vector<std::string>(targets.begin(), targets.end());
  return js.dump(2) + "\n";
}

void CompatibilityTable::allow(const std::string& source, const std::string& target) {
  targets_by_source_[source].insert(target);
}

bool CompatibilityTable::allows(const std::string& source, const std::string& target) const {
  auto it = targets_by_source_.find(source);
  return it != targets_by_source_.end() && it->second.count(target) > 0;
}

AdversarialBlock pick(const std::vector<corpus::Story>& source_stories, int l, nn::Rng& rng) {
  if (l < 1) throw std::invalid_argument("pick: need l >= 1");
  std::vector<int> qualifying;
  for (size_t i = 0; i < source_stories.size(); ++i)
    if (int(statements_of(source_stories[i]).size()) >= l) qualifying.push_back(int(i));
  if (qualifying.empty())
    throw std::runtime_error("pick: no source story has " + std::to_string(l) + " statements");
  const int story_idx = qualifying[rng.below(int(qualifying.size()))];
  const auto stmts = statements_of(source_stories[story_idx]);
  const int start = rng.below(int(stmts.size()) - l + 1);

  AdversarialBlock block;
  block.source_task = source_stories[story_idx].task_id;
  block.source_story_index = story_idx;
  block.start_sentence_index = start;
  block.sentences.assign(stmts.begin() + start, stmts.begin() + start + l);
  return block;
}

AdversarialBlock pick_full_block(const corpus::Story& source_story, int source_story_index) {
  if (source_story.sentences.empty() ||
      source_story.sentences.front().kind == corpus::SentenceKind::question)
    throw std::runtime_error("pick_full_block: story opens with a question");
  AdversarialBlock block;
  block.source_task = source_story.task_id;
  block.source_story_index = source_story_index;
  block.start_sentence_index = 0;
  for (const corpus::Sentence& s : source_story.sentences) {
    if (s.kind == corpus::SentenceKind::question) break;
    block.sentences.push_back(s);
  }
  return block;
}

AdversarialBlock permute(const AdversarialBlock& block, const std::vector<SynonymClass>& classes,
                         const std::map<SlotRef, std::string>& assignment) {
  AdversarialBlock out = block;
  for (const auto& [slot, replacement] : assignment) {
    const auto [si, ti] = slot;
    if (si < 0 || si >= int(out.sentences.size()) || ti < 0 ||
        ti >= int(out.sentences[si].tokens.size()))
      throw std::invalid_argument("permute: slot out of range");
    std::string& word = out.sentences[si].tokens[ti];
    const int ci = find_class(classes, word);
    if (ci < 0) throw std::invalid_argument("permute: '" + word + "' is in no synonym class");
    const auto& members = classes[ci].members;
    if (std::find(members.begin(), members.end(), replacement) == members.end())
      throw std::invalid_argument("permute: '" + replacement + "' is outside the class of '" +
                                  word + "'");
    out.permutation_record.push_back({si, ti, word, replacement});
    word = replacement;
  }
  return out;
}

PermutationEnumerator::PermutationEnumerator(AdversarialBlock block,
                                             const std::vector<SynonymClass>& classes,
                                             const std::vector<SlotRef>& slots)
    : base_(std::move(block)), classes_(classes), slots_(slots) {
  for (const auto& [si, ti] : slots_) {
    const std::string& word = base_.sentences.at(si).tokens.at(ti);
    const int ci = find_class(classes_, word);
    if (ci < 0)
      throw std::invalid_argument("enumerate: '" + word + "' is in no synonym class");
    class_of_slot_.push_back(ci);
    total_ *= classes_[ci].members.size();
  }
}

AdversarialBlock PermutationEnumerator::at(uint64_t index) const {
  if (index >= total_) throw std::out_of_range("enumerate: index past total");
  std::map<SlotRef, std::string> assignment;
  // mixed radix, last slot fastest
  for (int s = int(slots_.size()) - 1; s >= 0; --s) {
    const auto& members = classes_[class_of_slot_[s]].members;
    assignment[slots_[s]] = members[index % members.size()];
    index /= members.size();
  }
  return permute(base_, classes_, assignment);
}

AdversarialBlock greedy_permute(const AdversarialBlock& block,
                                const std::vector<SynonymClass>& classes,
                                std::vector<SlotRef> slots, const BlockScorer& scorer) {
  std::sort(slots.begin(), slots.end());
  AdversarialBlock best = block;
  double best_score = scorer(best);
  for (const SlotRef& slot : slots) {
    const std::string incumbent = best.sentences.at(slot.first).tokens.at(slot.second);
    const int ci = find_class(classes, incumbent);
    if (ci < 0)
      throw std::invalid_argument("greedy_permute: '" + incumbent + "' is in no synonym class");
    for (const std::string& candidate : classes[ci].members) {
      if (candidate == incumbent) continue;
      AdversarialBlock trial = permute(best, classes, {{slot, candidate}});
      const double score = scorer(trial);
      if (score < best_score) {  // strict improvement; ties keep the incumbent
        best_score = score;
        best = std::move(trial);
      }
    }
  }
  return best;
}

corpus::Story plug(const corpus::Story& target_story, const AdversarialBlock& block,
                   Position position, bool first_question_only) {
  for (const corpus::Sentence& s : block.sentences)
    if (s.kind == corpus::SentenceKind::question)
      throw std::invalid_argument("plug: block contains a question");

  auto flagged = [&]() {
    std::vector<corpus::Sentence> copy = block.sentences;
    for (corpus::Sentence& s : copy) s.adversarial = true;
    return copy;
  };

  corpus::Story out;
  out.task_id = target_story.task_id;
  if (position == Position::before_story || position == Position::both) {
    const auto head = flagged();
    out.sentences.insert(out.sentences.end(), head.begin(), head.end());
  }
  bool injected_before_question = false;
  for (const corpus::Sentence& s : target_story.sentences) {
    const bool inject_here =
        (position == Position::before_question || position == Position::both) &&
        s.kind == corpus::SentenceKind::question &&
        (!first_question_only || !injected_before_question);
    if (inject_here) {
      const auto copy = flagged();
      out.sentences.insert(out.sentences.end(), copy.begin(), copy.end());
      injected_before_question = true;
    }
    out.sentences.push_back(s);
  }
  return out;
}

std::vector<SlotRef> class_slots(const AdversarialBlock& block,
                                 const std::vector<SynonymClass>& classes, int max_slots) {
  std::vector<SlotRef> slots;
  for (int si = 0; si < int(block.sentences.size()); ++si) {
    const auto& tokens = block.sentences[si].tokens;
    for (int ti = 0; ti < int(tokens.size()); ++ti)
      if (find_class(classes, tokens[ti]) >= 0) {
        slots.push_back({si, ti});
        if (max_slots >= 0 && int(slots.size()) == max_slots) return slots;
      }
  }
  return slots;
}

TransformResult transform(const corpus::Story& target_story, const AttackSpec& spec,
                          const std::vector<corpus::Story>& source_stories,
                          const std::vector<SynonymClass>& classes, const corpus::Vocab& vocab,
                          nn::Rng& rng, const BlockScorer& scorer,
                          const CompatibilityTable& table) {
  spec.validate();
  if (!table.allows(spec.source_task, spec.target_task))
    throw std::invalid_argument("transform: pair (" + spec.source_task + " -> " +
                                spec.target_task + ") not in the compatibility table");

  TransformResult result;
  if (spec.full_block) {
    std::vector<int> qualifying;
    for (size_t i = 0; i < source_stories.size(); ++i)
      if (!source_stories[i].sentences.empty() &&
          source_stories[i].sentences.front().kind == corpus::SentenceKind::statement)
        qualifying.push_back(int(i));
    if (qualifying.empty()) throw std::runtime_error("transform: no full-block source story");
    const int idx = qualifying[rng.below(int(qualifying.size()))];
    result.block = pick_full_block(source_stories[idx], idx);
  } else {
    result.block = pick(source_stories, spec.num_sentences, rng);
  }

  if (!spec.permute_classes.empty()) {
    std::vector<SynonymClass> active;
    for (const std::string& name : spec.permute_classes) {
      auto it = std::find_if(classes.begin(), classes.end(),
                             [&](const SynonymClass& c) { return c.name == name; });
      if (it == classes.end())
        throw std::invalid_argument("transform: unknown synonym class '" + name + "'");
      active.push_back(*it);
    }
    const auto slots = class_slots(result.block, active);
    if (scorer) {
      result.block = greedy_permute(result.block, active, slots, scorer);
    } else {
      std::map<SlotRef, std::string> assignment;
      for (const SlotRef& slot : slots) {
        const std::string& word = result.block.sentences[slot.first].tokens[slot.second];
        const auto& members = active[size_t(find_class(active, word))].members;
        assignment[slot] = members[rng.below(int(members.size()))];
      }
      result.block = permute(result.block, active, assignment);
    }
  }

  result.story = plug(target_story, result.block, spec.position, spec.first_question_only);
  result.sequence = corpus::encode(result.story, vocab);

  // answer preservation is structural; verify it anyway
  const corpus::EncodedSequence clean = corpus::encode(target_story, vocab);
  if (clean.targets != result.sequence.targets)
    throw std::logic_error("transform: targets changed");
  return result;
}

std::vector<SynonymClass> default_synonym_classes() {
  return {{"location-words", corpus::location_bank()}, {"name-words", corpus::name_bank()}};
}

}  // namespace dnclab::meta
