#pragma once

#include <map>
#include <string>
#include <vector>

#include "dnclab/corpus/babi.hpp"
#include "dnclab/corpus/synth.hpp"
#include "dnclab/corpus/vocab.hpp"
#include "dnclab/dnc/config.hpp"
#include "dnclab/train/trainer.hpp"

namespace dnclab::harness {

struct DatasetConfig {
  std::string mode = "synthetic";  // "synthetic" | "babi"
  // synthetic
  std::vector<std::string> kinds = {"movement", "direction-graph"};
  corpus::SynthParams params;
  std::map<std::string, corpus::SynthParams> params_by_kind;  // per-kind overrides
  int train_stories = 400;
  int test_stories = 100;
  uint64_t seed = 11;
  // babi: task id -> file path
  std::map<std::string, std::string> babi_train;
  std::map<std::string, std::string> babi_test;
};

struct RunConfig {
  DatasetConfig dataset;
  dnc::DncConfig model;  // input/output sizes of 0 are filled from the vocabulary
  train::TrainConfig train;
};

RunConfig run_config_from_json(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
// Canonical serialization; its hash identifies the run.
std::string run_config_to_json(const RunConfig& config);

// Corpus + vocabulary + encoded train/test splits, ready for the trainer
// and the sweeps.
struct LabData {
  corpus::Vocab vocab;
  std::map<std::string, std::vector<corpus::Story>> train_stories;
  std::map<std::string, std::vector<corpus::Story>> test_stories;
  train::Dataset encoded;  // same stories, encoded, task order = config order
};

LabData build_data(const DatasetConfig& config);

// model config with input/output sizes resolved against the vocabulary
dnc::DncConfig resolve_model(const dnc::DncConfig& model, const corpus::Vocab& vocab);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dnclab::harness
