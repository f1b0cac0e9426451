#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dnclab/corpus/encode.hpp"
#include "dnclab/corpus/types.hpp"
#include "dnclab/nn/rng.hpp"

namespace dnclab::meta {

// A block of consecutive non-question sentences lifted from a source-task
// story, with the record of any synonym substitutions applied to it.
struct AdversarialBlock {
  std::string source_task;
  std::vector<corpus::Sentence> sentences;  // statements only
  int source_story_index = -1;
  int start_sentence_index = -1;  // within the question-stripped story
  struct Substitution {
    int sentence = 0;
    int token = 0;
    std::string original;
    std::string replacement;
  };
  std::vector<Substitution> permutation_record;
};

enum class Position { before_story, before_question, both };
std::string position_name(Position p);
Position position_from_name(const std::string& name);

struct SynonymClass {
  std::string name;
  std::vector<std::string> members;  // pairwise distinct; product order follows this list
};

// (sentence index, token index) inside a block
using SlotRef = std::pair<int, int>;

struct AttackSpec {
  std::string target_task;
  std::string source_task;
  Position position = Position::before_question;
  int num_sentences = 0;   // l >= 1, exclusive with full_block
  bool full_block = false;
  uint64_t seed = 0;
  std::vector<std::string> permute_classes;  // names of SynonymClass entries; empty = Pick-n-Plug
  // Table-1-wording variant: inject before the first question only instead
  // of before every question.
  bool first_question_only = false;

  void validate() const;
};

std::string attack_spec_to_json(const AttackSpec& spec);
AttackSpec attack_spec_from_json(const std::string& json_text);

// The metamorphic relation between a task pair is a modeling assumption;
// the table records which pairs the user has declared. Seeded with the
// bAbI quadruple {3,15,16,19} and the four synthetic kinds.
class CompatibilityTable {
 public:
  static CompatibilityTable defaults();
  static CompatibilityTable from_json(const std::string& json_text);
  std::string to_json() const;

  void allow(const std::string& source, const std::string& target);
  bool allows(const std::string& source, const std::string& target) const;

 private:
  std::map<std::string, std::set<std::string>> targets_by_source_;
};

// Draw l consecutive statements from a uniformly chosen qualifying source
// story (questions stripped first, start index uniform).
AdversarialBlock pick(const std::vector<corpus::Story>& source_stories, int l, nn::Rng& rng);

// All statements preceding the story's first question. The story must not
// open with a question.
AdversarialBlock pick_full_block(const corpus::Story& source_story, int source_story_index = -1);

// Substitute words at the assigned positions with same-class "synonyms".
// Every assigned position must currently hold a word of the class that
// supplies its replacement; sentence lengths never change.
AdversarialBlock permute(const AdversarialBlock& block, const std::vector<SynonymClass>& classes,
                         const std::map<SlotRef, std::string>& assignment);

// Deterministic Cartesian product of class members over the given slots;
// the last slot varies fastest. index 0 reproduces the member-0 choice for
// every slot, not the original block.
class PermutationEnumerator {
 public:
  PermutationEnumerator(AdversarialBlock block, const std::vector<SynonymClass>& classes,
                        const std::vector<SlotRef>& slots);
  uint64_t total() const { return total_; }
  AdversarialBlock at(uint64_t index) const;

 private:
  AdversarialBlock base_;
  std::vector<SynonymClass> classes_;
  std::vector<SlotRef> slots_;
  std::vector<int> class_of_slot_;
  uint64_t total_ = 1;
};

using BlockScorer = std::function<double(const AdversarialBlock&)>;

// Visit slots in textual order; at each slot keep the substitution that
// strictly minimizes the scorer, ties keeping the incumbent word.
AdversarialBlock greedy_permute(const AdversarialBlock& block,
                                const std::vector<SynonymClass>& classes,
                                std::vector<SlotRef> slots, const BlockScorer& scorer);

// Inject the block into the target story. before_story inserts one copy up
// front; before_question inserts a fresh copy immediately before every
// question (or only the first, when asked); both does one of each. Injected
// sentences carry the adversarial flag, which encode() turns into
// Segment::adversary tags. Gold answers are untouched.
corpus::Story plug(const corpus::Story& target_story, const AdversarialBlock& block,
                   Position position, bool first_question_only = false);

// All slots in the block whose word belongs to one of the classes, textual
// order, optionally capped.
std::vector<SlotRef> class_slots(const AdversarialBlock& block,
                                 const std::vector<SynonymClass>& classes, int max_slots = -1);

struct TransformResult {
  corpus::Story story;           // adversarial story, injected sentences flagged
  AdversarialBlock block;        // block after any permutation
  corpus::EncodedSequence sequence;
};

// Full attack composition: pick (or pick_full_block) -> optional permute
// (random same-class substitutions, or greedy against a scorer) -> plug ->
// encode. The output's answer mask and targets always equal the clean
// encoding's.
TransformResult transform(const corpus::Story& target_story, const AttackSpec& spec,
                          const std::vector<corpus::Story>& source_stories,
                          const std::vector<SynonymClass>& classes, const corpus::Vocab& vocab,
                          nn::Rng& rng, const BlockScorer& scorer = nullptr,
                          const CompatibilityTable& table = CompatibilityTable::defaults());

// The synonym classes the synthetic corpus ships with: the 8 location words
// and the 4 entity names.
std::vector<SynonymClass> default_synonym_classes();

}  // namespace dnclab::meta
