#include "dnclab/train/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace dnclab::train {

nn::Var masked_loss(const std::vector<nn::Var>& logits, const std::vector<char>& answer_mask,
                    const std::vector<int>& targets) {
  if (logits.size() != answer_mask.size())
    throw std::invalid_argument("masked_loss: mask/logits length mismatch");
  std::vector<nn::Var> terms;
  size_t ti = 0;
  for (size_t t = 0; t < logits.size(); ++t) {
    if (!answer_mask[t]) continue;
    terms.push_back(nn::ce_with_logits(logits[t], targets.at(ti++)));
  }
  if (terms.empty()) throw std::invalid_argument("masked_loss: no answer positions");
  if (ti != targets.size()) throw std::invalid_argument("masked_loss: target count mismatch");
  nn::Var total = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) total = add(total, terms[i]);
  return scale(total, 1.0 / double(terms.size()));
}

double masked_loss_value(const std::vector<nn::Mat>& logits, const std::vector<char>& answer_mask,
                         const std::vector<int>& targets) {
  if (logits.size() != answer_mask.size())
    throw std::invalid_argument("masked_loss: mask/logits length mismatch");
  double total = 0.0;
  size_t n = 0, ti = 0;
  for (size_t t = 0; t < logits.size(); ++t) {
    if (!answer_mask[t]) continue;
    const nn::Mat& y = logits[t];
    const int target = targets.at(ti++);
    double mx = y[0];
    for (double v : y.a) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : y.a) z += std::exp(v - mx);
    total += std::log(z) + mx - y[target];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("masked_loss: no answer positions");
  return total / double(n);
}

LossAndGrads loss_and_grads(const dnc::DncParams& params, const dnc::DncConfig& config,
                            const corpus::EncodedSequence& sequence) {
  nn::Tape tape;
  auto lifted = dnc::lift_params(tape, params);
  auto logits = dnc::run_dnc(lifted, config, sequence.token_ids);
  nn::Var loss = masked_loss(logits, sequence.answer_mask, sequence.targets);
  tape.backward(loss);

  LossAndGrads out;
  out.loss = loss.val().item();
  dnc::for_each_param(lifted, [&](const std::string&, const nn::Var& v) {
    out.grads.push_back(tape.grad(v));
  });
  return out;
}

std::vector<std::string> param_names(const dnc::DncParams& params) {
  std::vector<std::string> names;
  dnc::for_each_param(params, [&](const std::string& name, const nn::Mat&) {
    names.push_back(name);
  });
  return names;
}

}  // namespace dnclab::train
