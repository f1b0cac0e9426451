#include "dnclab/train/grad_check.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

#include "dnclab/nn/rng.hpp"

namespace dnclab::train {

double grad_check(const dnc::DncParams& params, const dnc::DncConfig& config,
                  const corpus::EncodedSequence& sequence, const GradCheckOptions& options) {
  LossAndGrads analytic = loss_and_grads(params, config, sequence);
  const auto names = param_names(params);
  for (size_t i = 0; i < analytic.grads.size(); ++i) {
    if (!analytic.grads[i].all_finite())
      throw std::runtime_error("grad_check: non-finite analytic gradient in " + names[i]);
    if (options.fault_scale_w_mu != 1.0 && names[i] == "w_mu")
      for (double& x : analytic.grads[i].a) x *= options.fault_scale_w_mu;
  }

  // flat coordinate space across all parameters
  std::vector<std::pair<int, int>> coords;  // (param index, flat offset)
  for (size_t i = 0; i < analytic.grads.size(); ++i)
    for (int j = 0; j < analytic.grads[i].size(); ++j) coords.push_back({int(i), j});
  if (options.max_coords >= 0 && options.max_coords < int(coords.size())) {
    nn::Rng rng(nn::splitmix64(options.subsample_seed));
    rng.shuffle(coords);
    coords.resize(size_t(options.max_coords));
  }
  if (coords.empty()) throw std::invalid_argument("grad_check: empty coordinate sample");

  dnc::DncParams work = params;
  std::vector<nn::Mat*> flat;
  dnc::for_each_param(work, [&](const std::string&, nn::Mat& m) { flat.push_back(&m); });

  auto eval = [&]() {
    auto logits = dnc::run_dnc(work, config, sequence.token_ids);
    return masked_loss_value(logits, sequence.answer_mask, sequence.targets);
  };

  double worst = 0.0;
  for (const auto& [pi, off] : coords) {
    double& slot = (*flat[pi])[off];
    const double saved = slot;
    auto stencil = [&](double eps) {
      slot = saved + eps;
      const double up1 = eval();
      slot = saved - eps;
      const double down1 = eval();
      slot = saved + 2.0 * eps;
      const double up2 = eval();
      slot = saved - 2.0 * eps;
      const double down2 = eval();
      slot = saved;
      return (down2 - 8.0 * down1 + 8.0 * up1 - up2) / (12.0 * eps);
    };
    std::vector<double> estimates;
    double eps = options.epsilon;
    for (int rung = 0; rung < std::max(2, options.ladder); ++rung, eps /= 3.0)
      estimates.push_back(stencil(eps));
    // The largest step has the least roundoff, so it wins by default; below
    // ~1e-6 the estimate is roundoff-limited either way and the top rung is
    // the only trustworthy one. At larger magnitudes roundoff jitter is
    // relatively tiny, so any visible disagreement between the top rungs
    // means a kink of the piecewise-smooth allocation sort was straddled;
    // the smaller-eps member of the best-agreeing pair further down the
    // ladder is then the uncontaminated estimate.
    double scale = 0.0;
    for (double e : estimates) scale = std::max(scale, std::fabs(e));
    double fd = estimates[0];
    if (scale >= 1e-6 && std::fabs(estimates[0] - estimates[1]) > 1e-5 * scale) {
      double best_gap = std::numeric_limits<double>::infinity();
      for (size_t i = 1; i + 1 < estimates.size(); ++i) {
        const double gap = std::fabs(estimates[i] - estimates[i + 1]);
        if (gap < best_gap) {
          best_gap = gap;
          fd = estimates[i + 1];
        }
      }
    }
    if (!std::isfinite(fd)) throw std::runtime_error("grad_check: non-finite finite difference");
    const double ga = analytic.grads[pi][off];
    const double rel = std::fabs(ga - fd) / std::max({std::fabs(ga), std::fabs(fd), 1e-8});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace dnclab::train
