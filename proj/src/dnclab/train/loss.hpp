#pragma once

#include <string>
#include <vector>

#include "dnclab/corpus/types.hpp"
#include "dnclab/dnc/forward.hpp"

namespace dnclab::train {

// Mean softmax cross-entropy over answer positions only. Errors when the
// sequence has no answer positions.
nn::Var masked_loss(const std::vector<nn::Var>& logits, const std::vector<char>& answer_mask,
                    const std::vector<int>& targets);

// Same quantity computed from plain logits (evaluation, finite differences).
double masked_loss_value(const std::vector<nn::Mat>& logits, const std::vector<char>& answer_mask,
                         const std::vector<int>& targets);

struct LossAndGrads {
  double loss = 0.0;
  std::vector<nn::Mat> grads;  // for_each_param order
};

// Full forward + backward for one sequence.
LossAndGrads loss_and_grads(const dnc::DncParams& params, const dnc::DncConfig& config,
                            const corpus::EncodedSequence& sequence);

std::vector<std::string> param_names(const dnc::DncParams& params);

}  // namespace dnclab::train
