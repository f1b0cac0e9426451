#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dnclab/corpus/types.hpp"
#include "dnclab/dnc/checkpoint.hpp"
#include "dnclab/train/loss.hpp"
#include "dnclab/train/optimizer.hpp"

namespace dnclab::train {

struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 16;
  int max_steps = 1000;
  double clip_norm = 10.0;
  uint64_t seed = 1;
  int eval_every = 200;
  int threads = 0;  // 0: use hardware concurrency
};

struct TaskData {
  std::string task_id;
  std::vector<corpus::EncodedSequence> train;
  std::vector<corpus::EncodedSequence> test;
};

struct Dataset {
  std::vector<TaskData> tasks;
};

struct EvalPoint {
  int step = 0;
  double loss = 0.0;  // mean batch loss at this step
  std::vector<std::pair<std::string, double>> clean_wer;  // per task, dataset order
};

struct TrainReport {
  uint64_t seed = 0;
  std::vector<EvalPoint> points;
  std::string final_checkpoint;  // set by callers that persist the result
};

std::string report_to_json(const TrainReport& report);

using EvalCallback = std::function<void(const EvalPoint&)>;

// Joint multi-task training: each batch slot samples a task uniformly, then
// a sequence uniformly within it. Gradients are averaged over the batch,
// globally clipped, and applied with Adam. Deterministic given the seed;
// batch items may be evaluated concurrently but are reduced in slot order.
// A non-finite loss aborts with a diagnostic. `on_eval` (when set) streams
// evaluation points as they happen.
std::pair<dnc::DncParams, TrainReport> train(dnc::DncParams params, const dnc::DncConfig& config,
                                             const TrainConfig& train_cfg, const Dataset& dataset,
                                             const EvalCallback& on_eval = nullptr);

// Pooled word error rate of the model over a set of encoded stories.
double evaluate_wer(const dnc::DncParams& params, const dnc::DncConfig& config,
                    const std::vector<corpus::EncodedSequence>& sequences);

}  // namespace dnclab::train
