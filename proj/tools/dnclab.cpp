// dnclab: train a small DNC, attack it with pick/permute/plug transforms,
// sweep memory sizes, probe control signals, and render report tables.
//
// Subcommands: train | attack | mem-sweep | probe | report
// Every run writes a manifest.json with the config hash and seed; CSV
// outputs are byte-identical across re-runs of the same manifest.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dnclab/harness/lab.hpp"
#include "dnclab/harness/manifest.hpp"
#include "dnclab/harness/probe_run.hpp"
#include "dnclab/harness/report.hpp"
#include "dnclab/harness/sweep.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dnclab;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> split_ints(const std::string& csv) {
  std::vector<int> out;
  for (const std::string& s : split_list(csv)) out.push_back(std::stoi(s));
  return out;
}

std::vector<double> split_doubles(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& s : split_list(csv)) out.push_back(std::stod(s));
  return out;
}

std::vector<uint64_t> split_seeds(const std::string& csv) {
  std::vector<uint64_t> out;
  for (const std::string& s : split_list(csv)) out.push_back(std::stoull(s));
  return out;
}

std::string output_root() {
  const char* env = std::getenv("DNCLAB_OUT");
  return env && *env ? env : "runs";
}

std::string resolve_out(const std::string& out, const std::string& command,
                        const std::string& run_id) {
  if (!out.empty()) return out;
  return output_root() + "/" + command + "-" + run_id;
}

std::string joined_argv(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

struct LoadedModel {
  dnc::DncConfig config;
  dnc::DncParams params;
  std::string checkpoint_hash;
};

LoadedModel load_model(const std::string& checkpoint_path, const corpus::Vocab& vocab) {
  dnc::Checkpoint ckpt = dnc::load_checkpoint(checkpoint_path);
  if (ckpt.config.input_size != vocab.size())
    throw std::runtime_error("checkpoint input size " + std::to_string(ckpt.config.input_size) +
                             " does not match vocabulary size " + std::to_string(vocab.size()) +
                             "; wrong dataset config?");
  return {ckpt.config, std::move(ckpt.params), harness::hash_file(checkpoint_path)};
}

int cmd_train(const std::string& config_path, std::string out, int threads,
              const std::string& argv_line) {
  harness::RunConfig cfg = harness::load_run_config(config_path);
  if (threads > 0) cfg.train.threads = threads;
  const std::string config_json = harness::run_config_to_json(cfg);
  harness::Manifest manifest = harness::make_manifest(argv_line, config_json, cfg.train.seed);
  out = resolve_out(out, "train", manifest.run_id);
  fs::create_directories(out);

  harness::LabData data = harness::build_data(cfg.dataset);
  const dnc::DncConfig model = harness::resolve_model(cfg.model, data.vocab);
  dnc::DncParams params = dnc::init_params(model, cfg.train.seed);
  std::cout << "training " << dnc::count_params(params) << " parameters on "
            << data.encoded.tasks.size() << " task(s)\n";
  auto on_eval = [](const train::EvalPoint& point) {
    std::cout << "step " << point.step << " loss " << point.loss;
    for (const auto& [task, wer] : point.clean_wer) std::cout << "  " << task << " wer " << wer;
    std::cout << std::endl;
  };
  auto [trained, report] = train::train(std::move(params), model, cfg.train, data.encoded, on_eval);

  const std::string ckpt_path = out + "/checkpoint.bin";
  dnc::save_checkpoint(ckpt_path, {model, trained, cfg.train.seed});
  report.final_checkpoint = ckpt_path;
  harness::write_file(out + "/train_report.json", train::report_to_json(report));
  harness::write_file(out + "/config.json", config_json);

  manifest.checkpoint_hash = harness::hash_file(ckpt_path);
  manifest.artifacts = {"checkpoint.bin", "train_report.json", "config.json"};
  harness::finalize_manifest(manifest, out);

  std::cout << "checkpoint: " << ckpt_path << "\n";
  return 0;
}

harness::SweepContext make_context(const harness::LabData& data, const LoadedModel& model,
                                   const std::string& target_task, int threads) {
  harness::SweepContext ctx;
  ctx.params = &model.params;
  ctx.config = model.config;
  ctx.vocab = &data.vocab;
  ctx.target_task = target_task;
  if (!data.test_stories.count(target_task))
    throw std::runtime_error("target task '" + target_task + "' not in dataset");
  ctx.target_stories = &data.test_stories.at(target_task);
  ctx.sources = &data.test_stories;
  ctx.threads = threads;
  return ctx;
}

int cmd_attack(const std::string& config_path, const std::string& checkpoint,
               const std::string& target, const std::string& sources_csv,
               const std::string& positions_csv, const std::string& counts_csv, bool full_block,
               bool no_full, const std::string& seeds_csv, uint64_t seed,
               const std::string& permute_csv, bool first_question_only, std::string out,
               int threads, const std::string& argv_line) {
  harness::RunConfig cfg = harness::load_run_config(config_path);
  const std::string config_json = harness::run_config_to_json(cfg);
  harness::Manifest manifest = harness::make_manifest(argv_line, config_json, seed);
  out = resolve_out(out, "attack", manifest.run_id);
  fs::create_directories(out);

  harness::LabData data = harness::build_data(cfg.dataset);
  LoadedModel model = load_model(checkpoint, data.vocab);
  harness::SweepContext ctx = make_context(data, model, target, threads);

  harness::AttackAxes axes;
  axes.source_tasks = split_list(sources_csv);
  for (const std::string& p : split_list(positions_csv))
    axes.positions.push_back(meta::position_from_name(p));
  axes.counts = counts_csv.empty() ? std::vector<int>{} : split_ints(counts_csv);
  if (axes.counts.empty() && !full_block) axes.counts = {1, 2, 3, 4};
  axes.include_full = full_block || !no_full;
  axes.seeds = seeds_csv.empty() ? std::vector<uint64_t>{seed} : split_seeds(seeds_csv);
  axes.permute_classes = split_list(permute_csv);
  axes.first_question_only = first_question_only;

  const auto rows = harness::attack_sweep(ctx, axes);
  harness::write_file(out + "/results.csv", harness::rows_to_csv(rows));
  harness::write_file(out + "/attack_pivot.csv", harness::attack_pivot_csv(rows));

  manifest.checkpoint_hash = model.checkpoint_hash;
  manifest.artifacts = {"results.csv", "attack_pivot.csv"};
  harness::finalize_manifest(manifest, out);
  std::cout << harness::attack_pivot_csv(rows);
  std::cout << "results: " << out << "/results.csv\n";
  return 0;
}

int cmd_mem_sweep(const std::string& config_path, const std::string& checkpoint,
                  const std::string& target, const std::string& source,
                  const std::string& position, int num_sentences, bool full_block,
                  const std::string& factors_csv, const std::string& seeds_csv, uint64_t seed,
                  std::string out, int threads, const std::string& argv_line) {
  harness::RunConfig cfg = harness::load_run_config(config_path);
  const std::string config_json = harness::run_config_to_json(cfg);
  harness::Manifest manifest = harness::make_manifest(argv_line, config_json, seed);
  out = resolve_out(out, "mem-sweep", manifest.run_id);
  fs::create_directories(out);

  harness::LabData data = harness::build_data(cfg.dataset);
  LoadedModel model = load_model(checkpoint, data.vocab);
  harness::SweepContext ctx = make_context(data, model, target, threads);

  meta::AttackSpec spec;
  spec.target_task = target;
  spec.source_task = source;
  spec.position = meta::position_from_name(position);
  spec.num_sentences = full_block ? 0 : num_sentences;
  spec.full_block = full_block;

  const std::vector<double> factors =
      factors_csv.empty() ? std::vector<double>{0.5, 0.75, 1, 1.5, 2, 4, 8, 16, 32}
                          : split_doubles(factors_csv);
  const std::vector<uint64_t> seeds =
      seeds_csv.empty() ? std::vector<uint64_t>{seed} : split_seeds(seeds_csv);

  const auto rows = harness::mem_sweep(ctx, factors, spec, seeds);
  harness::write_file(out + "/results.csv", harness::rows_to_csv(rows));
  harness::write_file(out + "/mem_curve.csv", harness::mem_curve_csv(rows));

  manifest.checkpoint_hash = model.checkpoint_hash;
  manifest.artifacts = {"results.csv", "mem_curve.csv"};
  harness::finalize_manifest(manifest, out);
  std::cout << harness::mem_curve_csv(rows);
  return 0;
}

int cmd_probe(const std::string& config_path, const std::string& checkpoint,
              const std::string& target, const std::string& source, const std::string& position,
              int num_sentences, int slots, const std::string& classes_csv, int max_uaa,
              uint64_t seed, std::string out, int threads, const std::string& argv_line) {
  harness::RunConfig cfg = harness::load_run_config(config_path);
  const std::string config_json = harness::run_config_to_json(cfg);
  harness::Manifest manifest = harness::make_manifest(argv_line, config_json, seed);
  out = resolve_out(out, "probe", manifest.run_id);
  fs::create_directories(out);

  harness::LabData data = harness::build_data(cfg.dataset);
  LoadedModel model = load_model(checkpoint, data.vocab);
  harness::SweepContext ctx = make_context(data, model, target, threads);
  if (!classes_csv.empty()) {
    std::vector<meta::SynonymClass> selected;
    for (const std::string& name : split_list(classes_csv))
      for (const meta::SynonymClass& c : meta::default_synonym_classes())
        if (c.name == name) selected.push_back(c);
    if (selected.empty()) throw std::runtime_error("no matching synonym classes: " + classes_csv);
    ctx.classes = std::move(selected);
  }

  meta::AttackSpec spec;
  spec.target_task = target;
  spec.source_task = source;
  spec.position = meta::position_from_name(position);
  spec.num_sentences = num_sentences;

  probe::TripleSearchConfig search;
  search.slot_count = slots;
  search.max_uaa_attempts = max_uaa;

  const auto result = harness::probe_run(ctx, spec, search, seed, out);
  manifest.checkpoint_hash = model.checkpoint_hash;
  manifest.artifacts = {"status.json"};
  if (result.found)
    manifest.artifacts = {"status.json", "traces/ce.json", "traces/uaa.json", "traces/saa.json",
                          "report/comparison.json", "report/cosine_table.csv",
                          "report/kl_table.csv", "report/series.csv"};
  harness::finalize_manifest(manifest, out);
  std::cout << "probe status: " << result.status << " (tried " << result.saa_candidates_tried
            << " permutations)\n";
  return result.found ? 0 : 3;
}

int cmd_report(const std::string& in_dir, std::string out) {
  if (out.empty()) out = in_dir + "/report";
  fs::create_directories(out);
  bool produced = false;

  if (fs::exists(in_dir + "/manifest.json")) {
    harness::load_and_verify_manifest(in_dir + "/manifest.json");  // loud on edits
  }
  if (fs::exists(in_dir + "/results.csv")) {
    const auto rows = harness::rows_from_csv(harness::read_file(in_dir + "/results.csv"));
    harness::write_file(out + "/attack_pivot.csv", harness::attack_pivot_csv(rows));
    bool resized = false;
    for (const auto& r : rows) resized = resized || r.memory_factor != 1.0;
    if (resized) harness::write_file(out + "/mem_curve.csv", harness::mem_curve_csv(rows));
    produced = true;
  }
  if (fs::exists(in_dir + "/report/comparison.json") || fs::exists(in_dir + "/comparison.json")) {
    const std::string path = fs::exists(in_dir + "/report/comparison.json")
                                 ? in_dir + "/report/comparison.json"
                                 : in_dir + "/comparison.json";
    // regenerate the tables from persisted traces when present, otherwise
    // reuse the stored comparison
    probe::ComparisonReport report;
    if (fs::exists(in_dir + "/traces/ce.json")) {
      const auto ce = probe::trace_from_json(harness::read_file(in_dir + "/traces/ce.json"));
      const auto uaa = probe::trace_from_json(harness::read_file(in_dir + "/traces/uaa.json"));
      const auto saa = probe::trace_from_json(harness::read_file(in_dir + "/traces/saa.json"));
      report = probe::compare(ce, uaa, saa);
    } else {
      throw std::runtime_error("comparison.json without traces/ is not re-renderable: " + path);
    }
    harness::write_file(out + "/cosine_table.csv", harness::cosine_table_csv(report));
    harness::write_file(out + "/kl_table.csv", harness::kl_table_csv(report));
    harness::write_file(out + "/series.csv", harness::series_csv(report));
    produced = true;
  }
  if (!produced) throw std::runtime_error("report: nothing to render in " + in_dir);
  std::cout << "report written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DNC adversarial-attack laboratory"};
  app.require_subcommand(1);
  const std::string argv_line = joined_argv(argc, argv);

  std::string config_path, checkpoint, out, in_dir;
  std::string target, sources_csv, positions_csv = "before_question", counts_csv;
  std::string factors_csv, seeds_csv, permute_csv, classes_csv = "location-words";
  std::string source, position = "before_question";
  int num_sentences = 4, slots = 4, max_uaa = 64, threads = 0;
  uint64_t seed = 0;
  bool full_block = false, no_full = false, first_question_only = false;

  auto* train_cmd = app.add_subcommand("train", "train a DNC on the configured corpus");
  train_cmd->add_option("--config", config_path, "run config JSON")->required();
  train_cmd->add_option("--out", out, "output directory");
  train_cmd->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* attack_cmd = app.add_subcommand("attack", "sweep pick/plug attacks against a checkpoint");
  attack_cmd->add_option("--config", config_path)->required();
  attack_cmd->add_option("--checkpoint", checkpoint)->required();
  attack_cmd->add_option("--target-task", target)->required();
  attack_cmd->add_option("--source-task", sources_csv, "comma list of source tasks")->required();
  attack_cmd->add_option("--position", positions_csv, "before_story,before_question,both");
  attack_cmd->add_option("--num-sentences", counts_csv, "comma list of block sizes");
  attack_cmd->add_flag("--full-block", full_block, "include the full-block column only");
  attack_cmd->add_flag("--no-full-block", no_full, "drop the full-block column");
  attack_cmd->add_option("--seed", seed);
  attack_cmd->add_option("--seeds", seeds_csv, "comma list of seeds (overrides --seed)");
  attack_cmd->add_option("--permute-classes", permute_csv,
                         "synonym classes for Pick-Permute-Plug (empty = Pick-n-Plug)");
  attack_cmd->add_flag("--first-question-only", first_question_only,
                       "inject before the first question instead of every question");
  attack_cmd->add_option("--out", out);
  attack_cmd->add_option("--threads", threads);

  auto* mem_cmd = app.add_subcommand("mem-sweep", "clean/attacked WER across memory sizes");
  mem_cmd->add_option("--config", config_path)->required();
  mem_cmd->add_option("--checkpoint", checkpoint)->required();
  mem_cmd->add_option("--target-task", target)->required();
  mem_cmd->add_option("--source-task", source)->required();
  mem_cmd->add_option("--position", position);
  mem_cmd->add_option("--num-sentences", num_sentences);
  mem_cmd->add_flag("--full-block", full_block);
  mem_cmd->add_option("--factors", factors_csv, "comma list, default 0.5..32");
  mem_cmd->add_option("--seed", seed);
  mem_cmd->add_option("--seeds", seeds_csv);
  mem_cmd->add_option("--out", out);
  mem_cmd->add_option("--threads", threads);

  auto* probe_cmd = app.add_subcommand("probe", "find a CE/UAA/SAA triple and compare signals");
  probe_cmd->add_option("--config", config_path)->required();
  probe_cmd->add_option("--checkpoint", checkpoint)->required();
  probe_cmd->add_option("--target-task", target)->required();
  probe_cmd->add_option("--source-task", source)->required();
  probe_cmd->add_option("--position", position);
  probe_cmd->add_option("--num-sentences", num_sentences);
  probe_cmd->add_option("--slots", slots, "synonym slots to brute force");
  probe_cmd->add_option("--classes", classes_csv, "synonym class names");
  probe_cmd->add_option("--max-uaa-attempts", max_uaa);
  probe_cmd->add_option("--seed", seed);
  probe_cmd->add_option("--out", out);
  probe_cmd->add_option("--threads", threads);

  auto* report_cmd = app.add_subcommand("report", "render tables from a previous run directory");
  report_cmd->add_option("--in", in_dir, "run directory")->required();
  report_cmd->add_option("--out", out, "table output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(config_path, out, threads, argv_line);
    if (attack_cmd->parsed())
      return cmd_attack(config_path, checkpoint, target, sources_csv, positions_csv, counts_csv,
                        full_block, no_full, seeds_csv, seed, permute_csv, first_question_only,
                        out, threads, argv_line);
    if (mem_cmd->parsed())
      return cmd_mem_sweep(config_path, checkpoint, target, source, position, num_sentences,
                           full_block, factors_csv, seeds_csv, seed, out, threads, argv_line);
    if (probe_cmd->parsed())
      return cmd_probe(config_path, checkpoint, target, source, position, num_sentences, slots,
                       classes_csv, max_uaa, seed, out, threads, argv_line);
    if (report_cmd->parsed()) return cmd_report(in_dir, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
