#include "dnclab/train/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace dnclab::train {

Adam::Adam(const dnc::DncParams& shape_like, AdamConfig config) : cfg_(config) {
  dnc::for_each_param(shape_like, [&](const std::string&, const nn::Mat& p) {
    m_.emplace_back(p.rows, p.cols);
    v_.emplace_back(p.rows, p.cols);
  });
}

double global_norm(const std::vector<nn::Mat>& grads) {
  double s = 0.0;
  for (const nn::Mat& g : grads)
    for (double x : g.a) s += x * x;
  return std::sqrt(s);
}

void Adam::step(dnc::DncParams& params, std::vector<nn::Mat> grads) {
  if (grads.size() != m_.size()) throw std::invalid_argument("Adam: grad list size mismatch");
  if (cfg_.clip_norm > 0.0) {
    const double norm = global_norm(grads);
    if (norm > cfg_.clip_norm) {
      const double s = cfg_.clip_norm / norm;
      for (nn::Mat& g : grads)
        for (double& x : g.a) x *= s;
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
  size_t i = 0;
  dnc::for_each_param(params, [&](const std::string&, nn::Mat& p) {
    nn::Mat& m = m_[i];
    nn::Mat& v = v_[i];
    const nn::Mat& g = grads[i];
    for (int j = 0; j < p.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    ++i;
  });
}

}  // namespace dnclab::train
