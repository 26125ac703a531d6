// SPDX-License-Identifier: Apache-2.0
#include "sphmp/metrics.hpp"

#include "sphmp/error.hpp"
#include "sphmp/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace sphmp {
namespace {

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::vector<double> targets_of(const std::vector<PreparedGraph>& graphs) {
  std::vector<double> t;
  t.reserve(graphs.size());
  for (const auto& g : graphs) {
    if (!g.target) throw DataError("graph '" + g.id + "' has no target");
    t.push_back(*g.target);
  }
  return t;
}

}  // namespace

double mean_absolute_error(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) throw std::invalid_argument("metrics: size mismatch");
  if (targets.empty()) throw DataError("metrics: empty evaluation set");
  std::vector<double> err(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) err[i] = std::abs(predictions[i] - targets[i]);
  return sorted_sum(std::move(err)) / static_cast<double>(targets.size());
}

MetricReport compute_metrics(std::span<const double> predictions, std::span<const double> targets,
                             double ewt_threshold) {
  MetricReport r;
  r.mae = mean_absolute_error(predictions, targets);
  r.n_samples = targets.size();
  r.ewt_threshold = ewt_threshold;
  const double n = static_cast<double>(targets.size());
  const double mean = sorted_sum({targets.begin(), targets.end()}) / n;
  std::vector<double> sq(targets.size());
  std::size_t within = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    sq[i] = (targets[i] - mean) * (targets[i] - mean);
    if (std::abs(predictions[i] - targets[i]) < ewt_threshold) ++within;
  }
  const double stddev = std::sqrt(sorted_sum(std::move(sq)) / n);
  if (!(stddev > 0.0)) throw DataError("metrics: targets have zero variance, std. MAE undefined");
  r.std_mae = r.mae / stddev;
  r.ewt = static_cast<double>(within) / n;
  return r;
}

std::vector<PreparedGraph> prepare_dataset(const std::vector<Graph3D>& graphs, const RunConfig& cfg, int threads) {
  const BasisTables tables(cfg.cutoff_c, cfg.n_srbf, cfg.n_shbf);
  std::vector<PreparedGraph> out(graphs.size());
  parallel_for(graphs.size(), threads, [&](std::size_t i) { out[i] = prepare_graph(graphs[i], tables); });
  return out;
}

std::vector<double> predict_all(const ModelParams& params, const std::vector<PreparedGraph>& graphs, int threads) {
  std::vector<double> pred(graphs.size());
  parallel_for(graphs.size(), threads, [&](std::size_t i) { pred[i] = predict(graphs[i], params); });
  return pred;
}

MetricReport evaluate(const ModelParams& params, const std::vector<PreparedGraph>& graphs, int threads) {
  const auto targets = targets_of(graphs);
  const auto pred = predict_all(params, graphs, threads);
  return compute_metrics(pred, targets, params.config().ewt_threshold);
}

MetricReport evaluate(const ModelParams& params, const std::vector<Graph3D>& graphs, int threads) {
  return evaluate(params, prepare_dataset(graphs, params.config(), threads), threads);
}

std::string to_text(const MetricReport& r) {
  return "n_samples: " + std::to_string(r.n_samples) + "\nmae: " + format_double17(r.mae) +
         "\nstd_mae: " + format_double17(r.std_mae) + "\newt: " + format_double17(r.ewt) +
         "\newt_threshold: " + format_double(r.ewt_threshold) + "\n";
}

}  // namespace sphmp
