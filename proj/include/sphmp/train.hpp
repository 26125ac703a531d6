// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/network.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sphmp {

/// Per-graph gradients go to lane (position in batch) % kGradientLanes; lanes are
/// reduced in a fixed order, so the update does not depend on the thread count.
inline constexpr int kGradientLanes = 4;

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_mae = 0.0;  // running mean over the epoch's batches
  std::optional<double> valid_mae;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

/// Seeded shuffle, the first floor(n * valid_fraction) indices become validation.
SplitIndices split_dataset(std::size_t n, double valid_fraction, std::uint64_t seed);

struct TrainOptions {
  int threads = 1;
  /// Both empty: derived from the seed and cfg.valid_fraction.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> valid_indices;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  ModelParams best;  // lowest valid MAE (train MAE without a validation split)
  ModelParams last;
  std::vector<EpochRecord> log;
  int best_epoch = -1;
  long steps = 0;
};

/// Mini-batch Adam on the MAE loss. Throws DataError on an empty training set and
/// NumericalError naming the step when the loss becomes non-finite.
TrainResult train(const std::vector<Graph3D>& dataset, const RunConfig& cfg, std::uint64_t seed,
                  const TrainOptions& options = {});
TrainResult train_prepared(const std::vector<PreparedGraph>& train_set, const std::vector<PreparedGraph>& valid_set,
                           const RunConfig& cfg, std::uint64_t seed, const TrainOptions& options = {});

/// Header `epoch,lr,train_mae,valid_mae`; empty valid column without a validation split.
std::string epoch_log_csv(const std::vector<EpochRecord>& log);

}  // namespace sphmp
