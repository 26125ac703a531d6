// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/params.hpp"

namespace sphmp {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimState {
  Gradients first_moment;
  Gradients second_moment;
  long step = 0;
  double lr = 0.0;
};

OptimState make_optim_state(const ModelParams& params);

/// Bias-corrected Adam update, no weight decay. Throws std::invalid_argument on a
/// shape mismatch between params, grads and state.
void adam_step(ModelParams& params, const Gradients& grads, OptimState& opt, double lr,
               const AdamSettings& settings = {});

/// Learning rate at a fractional point of training: epoch plus step/steps_per_epoch.
/// Warmup ramps linearly from warmup_factor * init_lr; the decayed base follows the
/// step or cosine schedule counted from epoch 0.
double lr_at(const RunConfig& cfg, int epoch, int step = 0, int steps_per_epoch = 1);

}  // namespace sphmp
