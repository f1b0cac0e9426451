#include "dnclab/harness/lab.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dnclab/corpus/encode.hpp"
#include "dnclab/nn/rng.hpp"
#include "json.hpp"

namespace dnclab::harness {

namespace {

nlohmann::json dataset_to_json(const DatasetConfig& d) {
  nlohmann::json js;
  js["mode"] = d.mode;
  js["kinds"] = d.kinds;
  js["params"] = {{"n_entities", d.params.n_entities},
                  {"n_locations", d.params.n_locations},
                  {"n_sentences", d.params.n_sentences},
                  {"n_questions", d.params.n_questions}};
  if (!d.params_by_kind.empty()) {
    js["params_by_kind"] = nlohmann::json::object();
    for (const auto& [kind, p] : d.params_by_kind)
      js["params_by_kind"][kind] = {{"n_entities", p.n_entities},
                                    {"n_locations", p.n_locations},
                                    {"n_sentences", p.n_sentences},
                                    {"n_questions", p.n_questions}};
  }
  js["train_stories"] = d.train_stories;
  js["test_stories"] = d.test_stories;
  js["seed"] = d.seed;
  if (!d.babi_train.empty()) js["babi_train"] = d.babi_train;
  if (!d.babi_test.empty()) js["babi_test"] = d.babi_test;
  return js;
}

DatasetConfig dataset_from_json(const nlohmann::json& js) {
  DatasetConfig d;
  d.mode = js.value("mode", "synthetic");
  if (js.contains("kinds")) d.kinds = js.at("kinds").get<std::vector<std::string>>();
  if (js.contains("params")) {
    const auto& p = js.at("params");
    d.params.n_entities = p.value("n_entities", d.params.n_entities);
    d.params.n_locations = p.value("n_locations", d.params.n_locations);
    d.params.n_sentences = p.value("n_sentences", d.params.n_sentences);
    d.params.n_questions = p.value("n_questions", d.params.n_questions);
  }
  if (js.contains("params_by_kind")) {
    for (const auto& [kind, pj] : js.at("params_by_kind").items()) {
      corpus::SynthParams p = d.params;
      p.n_entities = pj.value("n_entities", p.n_entities);
      p.n_locations = pj.value("n_locations", p.n_locations);
      p.n_sentences = pj.value("n_sentences", p.n_sentences);
      p.n_questions = pj.value("n_questions", p.n_questions);
      d.params_by_kind[kind] = p;
    }
  }
  d.train_stories = js.value("train_stories", d.train_stories);
  d.test_stories = js.value("test_stories", d.test_stories);
  d.seed = js.value("seed", d.seed);
  if (js.contains("babi_train"))
    d.babi_train = js.at("babi_train").get<std::map<std::string, std::string>>();
  if (js.contains("babi_test"))
    d.babi_test = js.at("babi_test").get<std::map<std::string, std::string>>();
  return d;
}

}  // namespace

RunConfig run_config_from_json(const std::string& json_text) {
  const auto js = nlohmann::json::parse(json_text);
  RunConfig c;
  if (js.contains("dataset")) c.dataset = dataset_from_json(js.at("dataset"));
  if (js.contains("model")) {
    const auto& m = js.at("model");
    c.model.input_size = m.value("input_size", 0);
    c.model.output_size = m.value("output_size", 0);
    c.model.memory_rows = m.value("memory_rows", c.model.memory_rows);
    c.model.memory_width = m.value("memory_width", c.model.memory_width);
    c.model.read_heads = m.value("read_heads", c.model.read_heads);
    c.model.ctrl_output = m.value("ctrl_output", c.model.ctrl_output);
    c.model.hidden = m.value("hidden", c.model.hidden);
    c.model.layers = m.value("layers", c.model.layers);
    c.model.bidirectional = m.value("bidirectional", c.model.bidirectional);
  }
  if (js.contains("train")) {
    const auto& t = js.at("train");
    c.train.lr = t.value("lr", c.train.lr);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.max_steps = t.value("max_steps", c.train.max_steps);
    c.train.clip_norm = t.value("clip_norm", c.train.clip_norm);
    c.train.seed = t.value("seed", c.train.seed);
    c.train.eval_every = t.value("eval_every", c.train.eval_every);
    c.train.threads = t.value("threads", c.train.threads);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(read_file(path));
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::json js;
  js["dataset"] = dataset_to_json(c.dataset);
  js["model"] = {{"input_size", c.model.input_size},
                 {"output_size", c.model.output_size},
                 {"memory_rows", c.model.memory_rows},
                 {"memory_width", c.model.memory_width},
                 {"read_heads", c.model.read_heads},
                 {"ctrl_output", c.model.ctrl_output},
                 {"hidden", c.model.hidden},
                 {"layers", c.model.layers},
                 {"bidirectional", c.model.bidirectional}};
  js["train"] = {{"lr", c.train.lr},
                 {"batch_size", c.train.batch_size},
                 {"max_steps", c.train.max_steps},
                 {"clip_norm", c.train.clip_norm},
                 {"seed", c.train.seed},
                 {"eval_every", c.train.eval_every},
                 {"threads", c.train.threads}};
  return js.dump(2) + "\n";
}

LabData build_data(const DatasetConfig& config) {
  LabData data;
  if (config.mode == "synthetic") {
    // one vocabulary for every kind so stories from any source task encode
    std::vector<corpus::Story> universe;
    corpus::Story carrier;
    carrier.task_id = "vocab";
    corpus::Sentence s;
    s.tokens = corpus::synthetic_token_universe();
    s.tokens.push_back(".");
    carrier.sentences.push_back(s);
    corpus::Sentence q;
    q.kind = corpus::SentenceKind::question;
    q.tokens = {"where", "is", "mary", "?"};
    q.answers = {"hallway"};
    carrier.sentences.push_back(q);
    universe.push_back(carrier);
    data.vocab = corpus::build_vocab(universe);

    for (size_t k = 0; k < config.kinds.size(); ++k) {
      const corpus::TaskKind kind = corpus::kind_from_name(config.kinds[k]);
      const auto it = config.params_by_kind.find(config.kinds[k]);
      const corpus::SynthParams& params =
          it == config.params_by_kind.end() ? config.params : it->second;
      const uint64_t train_seed = nn::derive_stream(config.seed, 2 * k);
      const uint64_t test_seed = nn::derive_stream(config.seed, 2 * k + 1);
      data.train_stories[config.kinds[k]] =
          corpus::synth_generate(kind, params, train_seed, config.train_stories);
      data.test_stories[config.kinds[k]] =
          corpus::synth_generate(kind, params, test_seed, config.test_stories);
    }
  } else if (config.mode == "babi") {
    std::vector<corpus::Story> all;
    for (const auto& [task, path] : config.babi_train) {
      data.train_stories[task] = corpus::parse_babi(read_file(path), task);
      all.insert(all.end(), data.train_stories[task].begin(), data.train_stories[task].end());
    }
    for (const auto& [task, path] : config.babi_test) {
      data.test_stories[task] = corpus::parse_babi(read_file(path), task);
      all.insert(all.end(), data.test_stories[task].begin(), data.test_stories[task].end());
    }
    if (all.empty()) throw std::invalid_argument("build_data: no babi files configured");
    data.vocab = corpus::build_vocab(all);
  } else {
    throw std::invalid_argument("build_data: unknown dataset mode " + config.mode);
  }

  for (const auto& [task, stories] : data.train_stories) {
    train::TaskData td;
    td.task_id = task;
    for (const corpus::Story& story : stories) td.train.push_back(corpus::encode(story, data.vocab));
    if (data.test_stories.count(task))
      for (const corpus::Story& story : data.test_stories.at(task))
        td.test.push_back(corpus::encode(story, data.vocab));
    data.encoded.tasks.push_back(std::move(td));
  }
  return data;
}

dnc::DncConfig resolve_model(const dnc::DncConfig& model, const corpus::Vocab& vocab) {
  dnc::DncConfig out = model;
  if (out.input_size == 0) out.input_size = vocab.size();
  if (out.output_size == 0) out.output_size = vocab.size();
  out.validate();
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(contents.data(), std::streamsize(contents.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dnclab::harness
