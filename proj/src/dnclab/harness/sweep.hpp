#pragma once

#include <map>
#include <string>
#include <vector>

#include "dnclab/dnc/forward.hpp"
#include "dnclab/metamorph/attack.hpp"

namespace dnclab::harness {

struct ResultRow {
  std::string target_task;
  std::string source_task;  // "none" for the clean baseline
  std::string position;     // "clean" for the baseline
  std::string num_sentences;  // "0", "1".., or "full"
  double memory_factor = 1.0;
  double wer = 0.0;
  int64_t n_answers = 0;
  uint64_t seed = 0;
  std::string status = "ok";  // "ok" | "skipped_incompatible"
};

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& csv_text);

struct SweepContext {
  const dnc::DncParams* params = nullptr;
  dnc::DncConfig config;
  const corpus::Vocab* vocab = nullptr;
  std::string target_task;
  const std::vector<corpus::Story>* target_stories = nullptr;  // test split
  const std::map<std::string, std::vector<corpus::Story>>* sources = nullptr;  // test splits
  meta::CompatibilityTable table = meta::CompatibilityTable::defaults();
  std::vector<meta::SynonymClass> classes = meta::default_synonym_classes();
  int threads = 0;
};

struct AttackAxes {
  std::vector<std::string> source_tasks;
  std::vector<meta::Position> positions;
  std::vector<int> counts;  // l values
  bool include_full = true;
  std::vector<uint64_t> seeds;
  std::vector<std::string> permute_classes;  // empty = Pick-n-Plug
  bool first_question_only = false;
};

// WER of one attack cell: every target story transformed with its own rng
// stream derived from (seed, story index), so parallel and serial runs
// agree bit for bit.
ResultRow eval_attack_cell(const SweepContext& ctx, const meta::AttackSpec& spec, uint64_t seed);

// Clean WER of the target under the context's (possibly resized) config.
ResultRow eval_clean(const SweepContext& ctx, uint64_t seed);

// The full grid: a clean baseline row plus one row per
// (source, position, l or full, seed). Incompatible pairs produce
// skipped_incompatible rows instead of failing the sweep.
std::vector<ResultRow> attack_sweep(const SweepContext& ctx, const AttackAxes& axes);

// Clean and attacked WER at each memory resize factor, same controller
// parameters throughout. Factor 1 rows equal the unresized rows exactly.
std::vector<ResultRow> mem_sweep(const SweepContext& ctx, const std::vector<double>& factors,
                                 const meta::AttackSpec& attack, const std::vector<uint64_t>& seeds);

}  // namespace dnclab::harness
