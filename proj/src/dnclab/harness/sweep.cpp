#include "dnclab/harness/sweep.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dnclab/corpus/encode.hpp"
#include "dnclab/nn/rng.hpp"

namespace dnclab::harness {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double");
  return std::string(buf, end);
}

struct AnswerCount {
  int64_t wrong = 0;
  int64_t total = 0;
};

// deterministic parallel map over story indices; worker exceptions are
// rethrown on the calling thread
template <class Fn>
std::vector<AnswerCount> per_story(size_t n, int threads, Fn&& fn) {
  std::vector<AnswerCount> counts(n);
  const int n_threads =
      std::max(1, threads > 0 ? threads : int(std::thread::hardware_concurrency()));
  if (n_threads == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) counts[i] = fn(i);
    return counts;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n_threads));
  auto worker = [&](size_t first) {
    try {
      for (size_t i = first; i < n; i += size_t(n_threads)) counts[i] = fn(i);
    } catch (...) {
      errors[first] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker, size_t(w));
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return counts;
}

ResultRow reduce(const SweepContext& ctx, std::vector<AnswerCount> counts, ResultRow row) {
  int64_t wrong = 0, total = 0;
  for (const AnswerCount& c : counts) {
    wrong += c.wrong;
    total += c.total;
  }
  if (total == 0) throw std::runtime_error("sweep: no answers in target task");
  row.target_task = ctx.target_task;
  row.wer = double(wrong) / double(total);
  row.n_answers = total;
  return row;
}

AnswerCount count_answers(const dnc::DncParams& params, const dnc::DncConfig& config,
                          const corpus::EncodedSequence& seq) {
  const auto result = dnc::forward(params, config, seq);
  AnswerCount c;
  for (size_t i = 0; i < seq.targets.size(); ++i) {
    if (result.predictions[i] != seq.targets[i]) ++c.wrong;
    ++c.total;
  }
  return c;
}

}  // namespace

ResultRow eval_clean(const SweepContext& ctx, uint64_t seed) {
  const auto& stories = *ctx.target_stories;
  auto counts = per_story(stories.size(), ctx.threads, [&](size_t i) {
    return count_answers(*ctx.params, ctx.config, corpus::encode(stories[i], *ctx.vocab));
  });
  ResultRow row;
  row.source_task = "none";
  row.position = "clean";
  row.num_sentences = "0";
  row.seed = seed;
  return reduce(ctx, std::move(counts), std::move(row));
}

ResultRow eval_attack_cell(const SweepContext& ctx, const meta::AttackSpec& spec, uint64_t seed) {
  const auto& stories = *ctx.target_stories;
  const auto& sources = ctx.sources->at(spec.source_task);
  auto counts = per_story(stories.size(), ctx.threads, [&](size_t i) {
    nn::Rng rng(nn::derive_stream(seed, i));
    const auto t =
        meta::transform(stories[i], spec, sources, ctx.classes, *ctx.vocab, rng, nullptr, ctx.table);
    return count_answers(*ctx.params, ctx.config, t.sequence);
  });
  ResultRow row;
  row.source_task = spec.source_task;
  row.position = position_name(spec.position);
  row.num_sentences = spec.full_block ? "full" : std::to_string(spec.num_sentences);
  row.seed = seed;
  return reduce(ctx, std::move(counts), std::move(row));
}

std::vector<ResultRow> attack_sweep(const SweepContext& ctx, const AttackAxes& axes) {
  std::vector<ResultRow> rows;
  rows.push_back(eval_clean(ctx, 0));

  for (const std::string& source : axes.source_tasks) {
    if (!ctx.table.allows(source, ctx.target_task)) {
      ResultRow skip;
      skip.target_task = ctx.target_task;
      skip.source_task = source;
      skip.position = "-";
      skip.num_sentences = "-";
      skip.status = "skipped_incompatible";
      rows.push_back(std::move(skip));
      continue;
    }
    for (const meta::Position position : axes.positions) {
      std::vector<std::pair<int, bool>> cells;  // (l, full)
      for (int l : axes.counts) cells.push_back({l, false});
      if (axes.include_full) cells.push_back({0, true});
      for (const auto& [l, full] : cells) {
        for (uint64_t seed : axes.seeds) {
          meta::AttackSpec spec;
          spec.target_task = ctx.target_task;
          spec.source_task = source;
          spec.position = position;
          spec.num_sentences = l;
          spec.full_block = full;
          spec.seed = seed;
          spec.permute_classes = axes.permute_classes;
          spec.first_question_only = axes.first_question_only;
          rows.push_back(eval_attack_cell(ctx, spec, seed));
        }
      }
    }
  }
  return rows;
}

std::vector<ResultRow> mem_sweep(const SweepContext& ctx, const std::vector<double>& factors,
                                 const meta::AttackSpec& attack,
                                 const std::vector<uint64_t>& seeds) {
  std::vector<ResultRow> rows;
  for (double factor : factors) {
    SweepContext resized = ctx;
    resized.config = dnc::resize_memory(ctx.config, factor);
    ResultRow clean = eval_clean(resized, 0);
    clean.memory_factor = factor;
    rows.push_back(std::move(clean));
    for (uint64_t seed : seeds) {
      meta::AttackSpec spec = attack;
      spec.seed = seed;
      ResultRow attacked = eval_attack_cell(resized, spec, seed);
      attacked.memory_factor = factor;
      rows.push_back(std::move(attacked));
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "target_task,source_task,position,num_sentences,memory_factor,wer,n_answers,seed,status\n";
  for (const ResultRow& r : rows) {
    out += r.target_task + ',' + r.source_task + ',' + r.position + ',' + r.num_sentences + ',' +
           format_double(r.memory_factor) + ',' + format_double(r.wer) + ',' +
           std::to_string(r.n_answers) + ',' + std::to_string(r.seed) + ',' + r.status + '\n';
  }
  return out;
}

std::vector<ResultRow> rows_from_csv(const std::string& csv_text) {
  std::vector<ResultRow> rows;
  std::istringstream in(csv_text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw std::runtime_error("results csv: bad row: " + line);
    ResultRow r;
    r.target_task = fields[0];
    r.source_task = fields[1];
    r.position = fields[2];
    r.num_sentences = fields[3];
    r.memory_factor = std::stod(fields[4]);
    r.wer = std::stod(fields[5]);
    r.n_answers = std::stoll(fields[6]);
    r.seed = std::stoull(fields[7]);
    r.status = fields[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dnclab::harness
