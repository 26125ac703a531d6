// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/network.hpp"

#include <span>
#include <string>
#include <vector>

namespace sphmp {

struct MetricReport {
  double mae = 0.0;
  double std_mae = 0.0;  // mae / population std of the targets
  double ewt = 0.0;      // fraction of |error| < threshold
  double ewt_threshold = 0.0;
  std::size_t n_samples = 0;
};

/// Order-independent: absolute errors and targets are summed in sorted order.
/// Throws DataError on empty input or zero target variance.
MetricReport compute_metrics(std::span<const double> predictions, std::span<const double> targets,
                             double ewt_threshold);

/// Mean absolute error, summed in sorted order.
double mean_absolute_error(std::span<const double> predictions, std::span<const double> targets);

std::vector<PreparedGraph> prepare_dataset(const std::vector<Graph3D>& graphs, const RunConfig& cfg,
                                           int threads = 1);

/// Predictions of every graph, in input order.
std::vector<double> predict_all(const ModelParams& params, const std::vector<PreparedGraph>& graphs,
                                int threads = 1);

/// Every graph must carry a target (DataError otherwise).
MetricReport evaluate(const ModelParams& params, const std::vector<PreparedGraph>& graphs, int threads = 1);
MetricReport evaluate(const ModelParams& params, const std::vector<Graph3D>& graphs, int threads = 1);

/// `key: value` lines.
std::string to_text(const MetricReport& report);

}  // namespace sphmp
