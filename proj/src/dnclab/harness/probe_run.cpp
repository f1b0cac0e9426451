#include "dnclab/harness/probe_run.hpp"

#include <filesystem>

#include "dnclab/corpus/babi.hpp"
#include "dnclab/harness/lab.hpp"
#include "dnclab/harness/manifest.hpp"
#include "dnclab/harness/report.hpp"
#include "dnclab/probe/signals.hpp"
#include "json.hpp"

namespace dnclab::harness {

ProbeRunResult probe_run(const SweepContext& ctx, const meta::AttackSpec& spec,
                         const probe::TripleSearchConfig& search, uint64_t seed,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir + "/traces");
  fs::create_directories(out_dir + "/report");

  nn::Rng rng(nn::derive_stream(seed, 0));
  const auto triple =
      probe::find_triple(*ctx.params, ctx.config, *ctx.target_stories, spec,
                         ctx.sources->at(spec.source_task), ctx.classes, search, *ctx.vocab, rng);

  ProbeRunResult out;
  out.found = triple.found;
  out.status = triple.status;
  out.saa_candidates_tried = triple.saa_candidates_tried;

  nlohmann::json status;
  status["status"] = triple.status;
  status["found"] = triple.found;
  status["saa_candidates_tried"] = triple.saa_candidates_tried;
  write_file(out_dir + "/status.json", status.dump(2) + "\n");
  if (!triple.found) return out;

  const std::string config_hash = hash_string(dnc::config_to_json(ctx.config));
  write_file(out_dir + "/traces/ce.json", probe::trace_to_json(triple.ce, config_hash));
  write_file(out_dir + "/traces/uaa.json", probe::trace_to_json(triple.uaa, config_hash));
  write_file(out_dir + "/traces/saa.json", probe::trace_to_json(triple.saa, config_hash));
  write_file(out_dir + "/stories.json",
             corpus::stories_to_json({triple.ce_story, triple.uaa_story, triple.saa_story}));

  const probe::ComparisonReport report = probe::compare(triple.ce, triple.uaa, triple.saa);
  write_file(out_dir + "/report/comparison.json", probe::comparison_to_json(report));
  write_file(out_dir + "/report/cosine_table.csv", cosine_table_csv(report));
  write_file(out_dir + "/report/kl_table.csv", kl_table_csv(report));
  write_file(out_dir + "/report/series.csv", series_csv(report));
  return out;
}

}  // namespace dnclab::harness
