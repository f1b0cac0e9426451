#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnclab/corpus/types.hpp"

namespace dnclab::corpus {

// Desk-scale stand-ins for the four bAbI task families used in the attack
// experiments: entity movement, directional location graphs, deduction over
// categories, and induction over category attributes.
enum class TaskKind { movement, direction_graph, deduction, induction };

std::string kind_name(TaskKind kind);
TaskKind kind_from_name(const std::string& name);

struct SynthParams {
  int n_entities = 3;
  int n_locations = 4;  // for deduction/induction this is the category count
  int n_sentences = 6;
  int n_questions = 2;
};

// Generate stories by simulating a small world model; gold answers come from
// the same simulator that oracle_answers() exposes. Same seed, same stories.
// Unsatisfiable params raise std::invalid_argument (after bounded retries
// where the failure is probabilistic).
std::vector<Story> synth_generate(TaskKind kind, const SynthParams& params, uint64_t seed,
                                  int n_stories = 1);

// Answer every question of `kind` in the story from the sentences that
// precede it, by pattern-matching interpretation of the text alone. This is
// the metamorphic-preservation oracle: injected sentences from a compatible
// source kind never match the target kind's patterns, so answers are
// unchanged. Unanswerable questions raise std::runtime_error.
std::vector<std::vector<std::string>> oracle_answers(TaskKind kind, const Story& story);

// Word banks shared with the attack tooling. Locations are common to the
// movement and direction-graph kinds; the 8 locations double as the synonym
// set for brute-force permutation runs.
const std::vector<std::string>& location_bank();
const std::vector<std::string>& name_bank();

// Every token any generator can emit, so one vocabulary covers all four
// kinds regardless of which are in play.
std::vector<std::string> synthetic_token_universe();

}  // namespace dnclab::corpus
