#pragma once

#include <cstdint>

#include "dnclab/train/loss.hpp"

namespace dnclab::train {

struct GradCheckOptions {
  double epsilon = 3e-4;     // top of the step-size ladder
  int ladder = 5;            // rungs, each a third of the previous
  int max_coords = -1;       // <0: check every coordinate; otherwise random subsample
  uint64_t subsample_seed = 0;
  double fault_scale_w_mu = 1.0;  // test-only fault injection on the analytic w_mu gradient
};

// Compare the analytic gradient of the masked loss against central finite
// differences. Two numerical hazards pull the step size in opposite
// directions: coordinates with ~1e-8 gradients need a large step to beat
// the ~|loss|*ulp/eps roundoff floor, while the allocation weighting is
// only piecewise smooth (its row assignment jumps when usage values cross),
// so a large step can straddle a kink. Each coordinate therefore gets a
// fourth-order five-point estimate at a ladder of step sizes, and the
// adjacent pair that agrees best - chosen without looking at the analytic
// value - is trusted. Returns the max relative error
//   |g_a - g_fd| / max(|g_a|, |g_fd|, 1e-8)
// over the checked coordinates. Non-finite gradients and an empty
// coordinate sample are errors.
double grad_check(const dnc::DncParams& params, const dnc::DncConfig& config,
                  const corpus::EncodedSequence& sequence, const GradCheckOptions& options = {});

}  // namespace dnclab::train
