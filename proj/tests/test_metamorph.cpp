#include <algorithm>
#include <map>
#include <set>

#include "dnclab/corpus/synth.hpp"
#include "dnclab/corpus/vocab.hpp"
#include "dnclab/metamorph/attack.hpp"
#include "doctest.h"

using namespace dnclab;
using corpus::Sentence;
using corpus::SentenceKind;
using corpus::Story;

namespace {

Sentence stmt(std::vector<std::string> words) {
  Sentence s;
  s.tokens = std::move(words);
  return s;
}

Sentence quest(std::vector<std::string> words, std::vector<std::string> answers) {
  Sentence s;
  s.tokens = std::move(words);
  s.kind = SentenceKind::question;
  s.answers = std::move(answers);
  return s;
}

corpus::Vocab universe_vocab() {
  Story carrier;
  carrier.task_id = "vocab";
  Sentence s;
  s.tokens = corpus::synthetic_token_universe();
  s.tokens.push_back(".");
  carrier.sentences.push_back(s);
  carrier.sentences.push_back(quest({"where", "is", "mary", "?"}, {"hallway"}));
  return corpus::build_vocab({carrier});
}

// token-level Levenshtein, the oracle for the permutation-distance property
int levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = int(i);
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = int(j);
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

std::vector<std::string> flat_tokens(const meta::AdversarialBlock& b) {
  std::vector<std::string> out;
  for (const Sentence& s : b.sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

}  // namespace

TEST_CASE("pick: consecutive statements, uniform, never a question") {
  corpus::SynthParams p;
  p.n_sentences = 5;
  p.n_questions = 2;
  const auto stories = corpus::synth_generate(corpus::TaskKind::movement, p, 11, 20);

  nn::Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto block = meta::pick(stories, 3, rng);
    CHECK(block.sentences.size() == 3);
    for (const Sentence& s : block.sentences) CHECK(s.kind == SentenceKind::statement);
    // consecutive in the question-stripped source story
    const Story& src = stories[size_t(block.source_story_index)];
    std::vector<Sentence> stmts;
    for (const Sentence& s : src.sentences)
      if (s.kind == SentenceKind::statement) stmts.push_back(s);
    for (int i = 0; i < 3; ++i)
      CHECK(block.sentences[i].tokens == stmts[size_t(block.start_sentence_index + i)].tokens);
  }

  // single-statement story forces that statement
  Story tiny;
  tiny.task_id = "t";
  tiny.sentences = {stmt({"mary", "ran", "."}), quest({"where", "?"}, {"x"})};
  nn::Rng rng2(2);
  const auto forced = meta::pick({tiny}, 1, rng2);
  CHECK(forced.sentences[0].tokens == std::vector<std::string>{"mary", "ran", "."});

  CHECK_THROWS_AS(meta::pick({tiny}, 2, rng2), std::runtime_error);

  // fixed seed, identical block
  nn::Rng a(33), b(33);
  const auto ba = meta::pick(stories, 2, a);
  const auto bb = meta::pick(stories, 2, b);
  CHECK(ba.source_story_index == bb.source_story_index);
  CHECK(ba.start_sentence_index == bb.start_sentence_index);
}

TEST_CASE("pick_full_block: everything before the first question") {
  Story story;
  story.task_id = "t";
  story.sentences = {stmt({"s", "one", "."}), stmt({"s", "two", "."}),
                     quest({"q", "one", "?"}, {"a"}), stmt({"s", "three", "."}),
                     quest({"q", "two", "?"}, {"b"})};
  const auto block = meta::pick_full_block(story);
  REQUIRE(block.sentences.size() == 2);
  CHECK(block.sentences[0].tokens == std::vector<std::string>{"s", "one", "."});
  CHECK(block.sentences[1].tokens == std::vector<std::string>{"s", "two", "."});

  Story opens_with_q;
  opens_with_q.sentences = {quest({"q", "?"}, {"a"}), stmt({"s", "."})};
  CHECK_THROWS_AS(meta::pick_full_block(opens_with_q), std::runtime_error);
}

TEST_CASE("permute: class-checked substitutions, record kept, lengths fixed") {
  meta::AdversarialBlock block;
  block.source_task = "3";
  block.sentences = {stmt({"mary", "journeyed", "to", "the", "hallway", "."})};
  const auto classes = meta::default_synonym_classes();

  const auto once = meta::permute(block, classes, {{{0, 4}, "office"}});
  CHECK(once.sentences[0].tokens ==
        std::vector<std::string>{"mary", "journeyed", "to", "the", "office", "."});
  REQUIRE(once.permutation_record.size() == 1);
  CHECK(once.permutation_record[0].original == "hallway");
  CHECK(once.permutation_record[0].replacement == "office");

  // empty assignment is the identity
  const auto same = meta::permute(block, classes, {});
  CHECK(same.sentences[0].tokens == block.sentences[0].tokens);

  // a name-class substitution composes on top
  const auto renamed = meta::permute(once, classes, {{{0, 0}, "john"}});
  CHECK(renamed.sentences[0].tokens ==
        std::vector<std::string>{"john", "journeyed", "to", "the", "office", "."});
  CHECK(renamed.sentences[0].tokens.size() == block.sentences[0].tokens.size());

  // replacement must come from the class of the current word
  CHECK_THROWS_AS(meta::permute(block, classes, {{{0, 4}, "john"}}), std::invalid_argument);
  // the word at the slot must be in some class
  CHECK_THROWS_AS(meta::permute(block, classes, {{{0, 1}, "office"}}), std::invalid_argument);
}

TEST_CASE("enumerate_permutations: lexicographic Cartesian product") {
  meta::AdversarialBlock block;
  block.sentences = {stmt({"mary", "went", "to", "the", "hallway", "."}),
                     stmt({"john", "went", "to", "the", "garden", "."})};
  const auto classes = meta::default_synonym_classes();  // 8 locations

  meta::PermutationEnumerator two_slots(block, classes, {{0, 4}, {1, 4}});
  CHECK(two_slots.total() == 64);

  meta::SynonymClass ab{"ab", {"a", "b"}};
  meta::AdversarialBlock small;
  small.sentences = {stmt({"a", "."})};
  meta::PermutationEnumerator order(small, {ab}, {{0, 0}});
  REQUIRE(order.total() == 2);
  CHECK(order.at(0).sentences[0].tokens[0] == "a");
  CHECK(order.at(1).sentences[0].tokens[0] == "b");
  CHECK_THROWS_AS(order.at(2), std::out_of_range);

  meta::PermutationEnumerator none(block, classes, {});
  CHECK(none.total() == 1);
  CHECK(flat_tokens(none.at(0)) == flat_tokens(block));

  // four location slots over the 8-word class: the brute-force budget
  meta::AdversarialBlock four;
  four.sentences = {stmt({"mary", "went", "to", "the", "hallway", "."}),
                    stmt({"john", "went", "to", "the", "garden", "."}),
                    stmt({"mary", "went", "to", "the", "office", "."}),
                    stmt({"john", "went", "to", "the", "park", "."})};
  const auto slots = meta::class_slots(four, {classes[0]});
  CHECK(slots.size() == 4);
  CHECK(meta::PermutationEnumerator(four, {classes[0]}, slots).total() == 4096);
}

TEST_CASE("greedy_permute: strict improvement only, ties keep incumbent") {
  meta::AdversarialBlock block;
  block.sentences = {stmt({"mary", "went", "to", "the", "hallway", "."}),
                     stmt({"john", "went", "to", "the", "garden", "."})};
  const auto classes = meta::default_synonym_classes();
  const auto slots = meta::class_slots(block, {classes[0]});

  // constant scorer changes nothing
  const auto constant = meta::greedy_permute(block, classes, slots,
                                             [](const meta::AdversarialBlock&) { return 1.0; });
  CHECK(flat_tokens(constant) == flat_tokens(block));

  // scorer that rewards 'office' everywhere drives every slot to office
  auto office_scorer = [](const meta::AdversarialBlock& b) {
    double score = 0.0;
    for (const Sentence& s : b.sentences)
      for (const std::string& t : s.tokens)
        if (t == "office") score -= 1.0;
    return score;
  };
  const auto offices = meta::greedy_permute(block, classes, slots, office_scorer);
  CHECK(offices.sentences[0].tokens[4] == "office");
  CHECK(offices.sentences[1].tokens[4] == "office");

  // single slot, two candidates: the lower score wins
  meta::SynonymClass ab{"ab", {"good", "bad"}};
  meta::AdversarialBlock small;
  small.sentences = {stmt({"bad", "."})};
  const auto picked = meta::greedy_permute(
      small, {ab}, {{0, 0}},
      [](const meta::AdversarialBlock& b) { return b.sentences[0].tokens[0] == "good" ? 0.2 : 0.9; });
  CHECK(picked.sentences[0].tokens[0] == "good");
}

TEST_CASE("plug: insertion points and adversarial flags") {
  Story target;
  target.task_id = "t";
  target.sentences = {stmt({"s", "one", "."}), stmt({"s", "two", "."}),
                      quest({"q", "one", "?"}, {"a"}), stmt({"s", "three", "."}),
                      quest({"q", "two", "?"}, {"b"})};
  meta::AdversarialBlock block;
  block.sentences = {stmt({"a", "one", "."}), stmt({"a", "two", "."})};

  const Story before = meta::plug(target, block, meta::Position::before_story);
  REQUIRE(before.sentences.size() == 7);
  CHECK(before.sentences[0].adversarial);
  CHECK(before.sentences[1].adversarial);
  CHECK(before.sentences[0].tokens[0] == "a");
  CHECK_FALSE(before.sentences[2].adversarial);

  // a fresh copy lands before every question
  const Story everyq = meta::plug(target, block, meta::Position::before_question);
  REQUIRE(everyq.sentences.size() == 9);
  CHECK(everyq.sentences[2].adversarial);
  CHECK(everyq.sentences[3].adversarial);
  CHECK(everyq.sentences[4].kind == SentenceKind::question);
  CHECK(everyq.sentences[6].adversarial);
  CHECK(everyq.sentences[8].kind == SentenceKind::question);

  const Story firstq = meta::plug(target, block, meta::Position::before_question, true);
  CHECK(firstq.sentences.size() == 7);

  const Story both = meta::plug(target, block, meta::Position::both);
  CHECK(both.sentences.size() == 11);

  // empty block: identity
  const Story empty = meta::plug(target, meta::AdversarialBlock{}, meta::Position::both);
  CHECK(empty.sentences.size() == target.sentences.size());

  meta::AdversarialBlock bad;
  bad.sentences = {quest({"q", "?"}, {"x"})};
  CHECK_THROWS_AS(meta::plug(target, bad, meta::Position::before_story), std::invalid_argument);
}

TEST_CASE("compatibility table: defaults and JSON round trip") {
  const auto table = meta::CompatibilityTable::defaults();
  CHECK(table.allows("3", "19"));
  CHECK(table.allows("19", "15"));
  CHECK_FALSE(table.allows("3", "3"));
  CHECK(table.allows("movement", "direction-graph"));
  CHECK_FALSE(table.allows("movement", "3"));

  const auto back = meta::CompatibilityTable::from_json(table.to_json());
  CHECK(back.to_json() == table.to_json());
}

TEST_CASE("attack spec: validation and JSON round trip") {
  meta::AttackSpec spec;
  spec.target_task = "movement";
  spec.source_task = "direction-graph";
  spec.num_sentences = 3;
  spec.seed = 9;
  spec.permute_classes = {"location-words"};
  const auto back = meta::attack_spec_from_json(meta::attack_spec_to_json(spec));
  CHECK(meta::attack_spec_to_json(back) == meta::attack_spec_to_json(spec));

  meta::AttackSpec bad = spec;
  bad.full_block = true;  // both l and full set
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.full_block = false;
  bad.source_task = bad.target_task;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("transform: structural answer preservation over random specs") {
  const corpus::Vocab vocab = universe_vocab();
  corpus::SynthParams p;
  p.n_sentences = 6;
  p.n_questions = 2;
  const auto targets = corpus::synth_generate(corpus::TaskKind::movement, p, 21, 30);
  const auto sources = corpus::synth_generate(corpus::TaskKind::direction_graph, p, 22, 30);
  const auto classes = meta::default_synonym_classes();

  nn::Rng rng(5);
  for (int trial = 0; trial < 1500; ++trial) {
    const Story& target = targets[size_t(rng.below(int(targets.size())))];
    meta::AttackSpec spec;
    spec.target_task = "movement";
    spec.source_task = "direction-graph";
    spec.position = static_cast<meta::Position>(rng.below(3));
    if (rng.below(5) == 0) {
      spec.full_block = true;
    } else {
      spec.num_sentences = 1 + rng.below(4);
    }
    if (rng.below(2) == 0) spec.permute_classes = {"location-words"};

    const auto result = meta::transform(target, spec, sources, classes, vocab, rng);
    const auto clean = corpus::encode(target, vocab);

    CHECK(result.sequence.targets == clean.targets);
    CHECK(std::count(result.sequence.answer_mask.begin(), result.sequence.answer_mask.end(),
                     char(true)) ==
          std::count(clean.answer_mask.begin(), clean.answer_mask.end(), char(true)));

    // no question token inside an adversary segment
    const int qmark = vocab.index_of("?");
    for (size_t t = 0; t < result.sequence.token_ids.size(); ++t)
      if (result.sequence.segment_tags[t] == corpus::Segment::adversary)
        CHECK(result.sequence.token_ids[t] != qmark);

    // sentence count bookkeeping
    int insertion_points = 0;
    int questions = 0;
    for (const Sentence& s : target.sentences)
      if (s.kind == SentenceKind::question) ++questions;
    if (spec.position == meta::Position::before_story) insertion_points = 1;
    if (spec.position == meta::Position::before_question) insertion_points = questions;
    if (spec.position == meta::Position::both) insertion_points = 1 + questions;
    CHECK(result.story.sentences.size() ==
          target.sentences.size() + result.block.sentences.size() * size_t(insertion_points));
  }
}

TEST_CASE("transform: semantic preservation via the corpus oracle") {
  const corpus::Vocab vocab = universe_vocab();
  corpus::SynthParams p;
  p.n_sentences = 5;
  p.n_questions = 2;
  const auto classes = meta::default_synonym_classes();

  const std::pair<corpus::TaskKind, corpus::TaskKind> pairs[] = {
      {corpus::TaskKind::movement, corpus::TaskKind::direction_graph},
      {corpus::TaskKind::direction_graph, corpus::TaskKind::movement},
      {corpus::TaskKind::deduction, corpus::TaskKind::induction},
      {corpus::TaskKind::induction, corpus::TaskKind::movement},
  };
  nn::Rng rng(6);
  for (const auto& [target_kind, source_kind] : pairs) {
    const auto targets = corpus::synth_generate(target_kind, p, 31, 20);
    const auto sources = corpus::synth_generate(source_kind, p, 32, 20);
    for (int trial = 0; trial < 300; ++trial) {
      const Story& target = targets[size_t(rng.below(int(targets.size())))];
      meta::AttackSpec spec;
      spec.target_task = corpus::kind_name(target_kind);
      spec.source_task = corpus::kind_name(source_kind);
      spec.position = static_cast<meta::Position>(rng.below(3));
      spec.num_sentences = 1 + rng.below(3);
      if (rng.below(2) == 0) spec.permute_classes = {"location-words", "name-words"};

      const auto result = meta::transform(target, spec, sources, classes, vocab, rng);
      const auto adversarial_answers = corpus::oracle_answers(target_kind, result.story);
      const auto clean_answers = corpus::oracle_answers(target_kind, target);
      CHECK(adversarial_answers == clean_answers);
    }
  }
}

TEST_CASE("transform with empty permute classes is exactly Pick-n-Plug") {
  const corpus::Vocab vocab = universe_vocab();
  corpus::SynthParams p;
  const auto targets = corpus::synth_generate(corpus::TaskKind::movement, p, 41, 5);
  const auto sources = corpus::synth_generate(corpus::TaskKind::direction_graph, p, 42, 5);

  meta::AttackSpec spec;
  spec.target_task = "movement";
  spec.source_task = "direction-graph";
  spec.num_sentences = 2;

  nn::Rng r1(9), r2(9);
  const auto plain = meta::transform(targets[0], spec, sources, {}, vocab, r1);
  const auto via_empty = meta::transform(targets[0], spec, sources,
                                         meta::default_synonym_classes(), vocab, r2);
  CHECK(plain.sequence.token_ids == via_empty.sequence.token_ids);
}

TEST_CASE("transform refuses pairs outside the compatibility table") {
  const corpus::Vocab vocab = universe_vocab();
  corpus::SynthParams p;
  const auto targets = corpus::synth_generate(corpus::TaskKind::movement, p, 51, 2);
  meta::AttackSpec spec;
  spec.target_task = "movement";
  spec.source_task = "3";  // bAbI source against a synthetic target
  spec.num_sentences = 1;
  nn::Rng rng(1);
  CHECK_THROWS_AS(meta::transform(targets[0], spec, targets, {}, vocab, rng),
                  std::invalid_argument);
}

TEST_CASE("permutation distance equals the number of changed slots") {
  corpus::SynthParams p;
  p.n_sentences = 6;
  const auto stories = corpus::synth_generate(corpus::TaskKind::movement, p, 61, 10);
  const auto classes = meta::default_synonym_classes();
  nn::Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto block = meta::pick(stories, 1 + rng.below(3), rng);
    auto slots = meta::class_slots(block, classes);
    // keep a random subset
    std::map<meta::SlotRef, std::string> assignment;
    for (const auto& slot : slots) {
      if (rng.below(2)) continue;
      const std::string& current = block.sentences[slot.first].tokens[slot.second];
      // choose a replacement that differs
      for (const auto& cls : classes) {
        if (std::find(cls.members.begin(), cls.members.end(), current) == cls.members.end())
          continue;
        std::string candidate = current;
        while (candidate == current) candidate = cls.members[rng.below(int(cls.members.size()))];
        assignment[slot] = candidate;
      }
    }
    const auto permuted = meta::permute(block, classes, assignment);
    CHECK(levenshtein(flat_tokens(block), flat_tokens(permuted)) == int(assignment.size()));
    CHECK(permuted.permutation_record.size() == assignment.size());
  }
}
