// SPDX-License-Identifier: Apache-2.0
#include "sphmp/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sphmp {

OptimState make_optim_state(const ModelParams& params) {
  OptimState s;
  s.first_moment = params.zero_gradients();
  s.second_moment = params.zero_gradients();
  return s;
}

void adam_step(ModelParams& params, const Gradients& grads, OptimState& opt, double lr, const AdamSettings& st) {
  if (grads.size() != params.size() || opt.first_moment.size() != params.size() ||
      opt.second_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: tensor count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Mat& p = params.value(i);
    if (grads[i].rows() != p.rows() || grads[i].cols() != p.cols() || opt.first_moment[i].rows() != p.rows() ||
        opt.first_moment[i].cols() != p.cols() || opt.second_moment[i].rows() != p.rows() ||
        opt.second_moment[i].cols() != p.cols()) {
      throw std::invalid_argument("adam_step: shape mismatch for " + params.name(i));
    }
  }
  ++opt.step;
  opt.lr = lr;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(opt.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(opt.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* p = params.value(i).data();
    const double* g = grads[i].data();
    double* m = opt.first_moment[i].data();
    double* v = opt.second_moment[i].data();
    const Eigen::Index n = params.value(i).size();
    for (Eigen::Index k = 0; k < n; ++k) {
      m[k] = st.beta1 * m[k] + (1.0 - st.beta1) * g[k];
      v[k] = st.beta2 * v[k] + (1.0 - st.beta2) * g[k] * g[k];
      p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + st.eps);
    }
  }
}

double lr_at(const RunConfig& cfg, int epoch, int step, int steps_per_epoch) {
  if (epoch < 0 || step < 0 || steps_per_epoch <= 0) throw std::invalid_argument("lr_at: negative position");
  double base = cfg.init_lr;
  if (cfg.schedule == LrSchedule::Step) {
    base *= std::pow(cfg.decay_ratio, static_cast<double>(epoch / cfg.step_size));
  } else {
    const double t_max = cfg.effective_t_max();
    const double e = std::min(static_cast<double>(epoch), t_max);
    base *= 0.5 * (1.0 + std::cos(std::numbers::pi * e / t_max));
  }
  if (epoch < cfg.warmup_epochs) {
    const double progress =
        (epoch + static_cast<double>(step) / steps_per_epoch) / static_cast<double>(cfg.warmup_epochs);
    base *= cfg.warmup_factor + (1.0 - cfg.warmup_factor) * std::min(progress, 1.0);
  }
  return base;
}

}  // namespace sphmp
