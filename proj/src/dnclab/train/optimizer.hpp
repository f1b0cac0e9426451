#pragma once

#include <vector>

#include "dnclab/dnc/params.hpp"

namespace dnclab::train {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 10.0;  // global L2 clip; <= 0 disables
};

// Adaptive-moment optimizer over the flat parameter list (for_each order).
class Adam {
 public:
  Adam(const dnc::DncParams& shape_like, AdamConfig config);

  // grads must be in for_each_param order; clipping happens on the global
  // norm before the moment update
  void step(dnc::DncParams& params, std::vector<nn::Mat> grads);

  int64_t steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<nn::Mat> m_, v_;
  int64_t t_ = 0;
};

double global_norm(const std::vector<nn::Mat>& grads);

}  // namespace dnclab::train
