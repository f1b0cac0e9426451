#include "dnclab/train/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "dnclab/nn/rng.hpp"
#include "json.hpp"

namespace dnclab::train {

std::string report_to_json(const TrainReport& report) {
  nlohmann::json js;
  js["seed"] = report.seed;
  js["final_checkpoint"] = report.final_checkpoint;
  js["points"] = nlohmann::json::array();
  for (const EvalPoint& p : report.points) {
    nlohmann::json pj;
    pj["step"] = p.step;
    pj["loss"] = p.loss;
    pj["clean_wer"] = nlohmann::json::object();
    for (const auto& [task, wer] : p.clean_wer) pj["clean_wer"][task] = wer;
    js["points"].push_back(std::move(pj));
  }
  return js.dump(2) + "\n";
}

double evaluate_wer(const dnc::DncParams& params, const dnc::DncConfig& config,
                    const std::vector<corpus::EncodedSequence>& sequences) {
  size_t wrong = 0, total = 0;
  for (const corpus::EncodedSequence& seq : sequences) {
    const auto result = dnc::forward(params, config, seq);
    for (size_t i = 0; i < seq.targets.size(); ++i) {
      if (result.predictions.at(i) != seq.targets[i]) ++wrong;
      ++total;
    }
  }
  if (total == 0) throw std::invalid_argument("evaluate_wer: no answers");
  return double(wrong) / double(total);
}

std::pair<dnc::DncParams, TrainReport> train(dnc::DncParams params, const dnc::DncConfig& config,
                                             const TrainConfig& train_cfg, const Dataset& dataset,
                                             const EvalCallback& on_eval) {
  if (dataset.tasks.empty()) throw std::invalid_argument("train: empty dataset");
  for (const TaskData& t : dataset.tasks)
    if (t.train.empty()) throw std::invalid_argument("train: task " + t.task_id + " has no data");
  if (train_cfg.batch_size < 1 || train_cfg.max_steps < 0)
    throw std::invalid_argument("train: bad batch size or step count");

  TrainReport report;
  report.seed = train_cfg.seed;
  Adam opt(params, AdamConfig{train_cfg.lr, 0.9, 0.999, 1e-8, train_cfg.clip_norm});
  nn::Rng rng(nn::splitmix64(train_cfg.seed));
  const int n_threads = std::max(
      1, train_cfg.threads > 0 ? train_cfg.threads : int(std::thread::hardware_concurrency()));

  auto eval_point = [&](int step, double loss) {
    EvalPoint p;
    p.step = step;
    p.loss = loss;
    for (const TaskData& t : dataset.tasks)
      if (!t.test.empty()) p.clean_wer.push_back({t.task_id, evaluate_wer(params, config, t.test)});
    if (on_eval) on_eval(p);
    report.points.push_back(std::move(p));
  };

  for (int step = 1; step <= train_cfg.max_steps; ++step) {
    // draw the whole batch up front so the rng stream is independent of
    // thread scheduling
    std::vector<const corpus::EncodedSequence*> batch;
    for (int b = 0; b < train_cfg.batch_size; ++b) {
      const TaskData& task = dataset.tasks[rng.below(int(dataset.tasks.size()))];
      batch.push_back(&task.train[rng.below(int(task.train.size()))]);
    }

    std::vector<LossAndGrads> results(batch.size());
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n_threads));
    auto worker = [&](int first) {
      try {
        for (size_t b = size_t(first); b < batch.size(); b += size_t(n_threads))
          results[b] = loss_and_grads(params, config, *batch[b]);
      } catch (...) {
        errors[size_t(first)] = std::current_exception();
      }
    };
    if (n_threads == 1 || batch.size() == 1) {
      worker(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < n_threads; ++w) threads.emplace_back(worker, w);
      for (std::thread& t : threads) t.join();
    }
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);

    double loss = 0.0;
    std::vector<nn::Mat> grads = std::move(results[0].grads);
    loss += results[0].loss;
    for (size_t b = 1; b < results.size(); ++b) {
      loss += results[b].loss;
      for (size_t i = 0; i < grads.size(); ++i)
        for (int j = 0; j < grads[i].size(); ++j) grads[i][j] += results[b].grads[i][j];
    }
    loss /= double(results.size());
    const double inv = 1.0 / double(results.size());
    for (nn::Mat& g : grads)
      for (double& x : g.a) x *= inv;

    if (!std::isfinite(loss))
      throw std::runtime_error("train: loss became non-finite at step " + std::to_string(step));
    opt.step(params, std::move(grads));

    if (train_cfg.eval_every > 0 &&
        (step % train_cfg.eval_every == 0 || step == train_cfg.max_steps))
      eval_point(step, loss);
  }
  return {std::move(params), std::move(report)};
}

}  // namespace dnclab::train
