// SPDX-License-Identifier: Apache-2.0
#include "sphmp/train.hpp"

#include "sphmp/error.hpp"
#include "sphmp/metrics.hpp"
#include "sphmp/optim.hpp"
#include "sphmp/parallel.hpp"
#include "sphmp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sphmp {
namespace {

std::vector<std::size_t> shuffled(std::size_t n, CounterRng rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  return idx;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

SplitIndices split_dataset(std::size_t n, double valid_fraction, std::uint64_t seed) {
  const auto order = shuffled(n, CounterRng(seed, "split"));
  const auto n_valid = static_cast<std::size_t>(std::floor(static_cast<double>(n) * valid_fraction));
  SplitIndices s;
  s.valid.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_valid));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_valid), order.end());
  std::sort(s.valid.begin(), s.valid.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

TrainResult train(const std::vector<Graph3D>& dataset, const RunConfig& cfg, std::uint64_t seed,
                  const TrainOptions& options) {
  if (dataset.empty()) throw DataError("train: empty dataset");
  validate(cfg);
  SplitIndices split;
  if (options.train_indices.empty() && options.valid_indices.empty()) {
    split = split_dataset(dataset.size(), cfg.valid_fraction, seed);
  } else {
    split.train = options.train_indices;
    split.valid = options.valid_indices;
  }
  const auto prepared = prepare_dataset(dataset, cfg, options.threads);
  std::vector<PreparedGraph> train_set;
  std::vector<PreparedGraph> valid_set;
  for (auto i : split.train) {
    if (i >= dataset.size()) throw std::out_of_range("train: split index out of range");
    train_set.push_back(prepared[i]);
  }
  for (auto i : split.valid) {
    if (i >= dataset.size()) throw std::out_of_range("train: split index out of range");
    valid_set.push_back(prepared[i]);
  }
  return train_prepared(train_set, valid_set, cfg, seed, options);
}

TrainResult train_prepared(const std::vector<PreparedGraph>& train_set, const std::vector<PreparedGraph>& valid_set,
                           const RunConfig& cfg, std::uint64_t seed, const TrainOptions& options) {
  if (train_set.empty()) throw DataError("train: empty training set");
  validate(cfg);
  for (const auto* set : {&train_set, &valid_set}) {
    for (const auto& g : *set) {
      if (!g.target) throw DataError("train: graph '" + g.id + "' has no target");
    }
  }

  ModelParams params = init_params(cfg, seed);
  OptimState opt = make_optim_state(params);
  std::vector<Gradients> lanes(kGradientLanes, params.zero_gradients());
  Gradients total = params.zero_gradients();

  const std::size_t n = train_set.size();
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const int steps_per_epoch = static_cast<int>((n + batch - 1) / batch);

  TrainResult result{params, params, {}, -1, 0};
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<double> epoch_errors(n);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto order = shuffled(n, CounterRng(seed, fnv1a("shuffle") ^ splitmix64(static_cast<std::uint64_t>(epoch))));
    const double epoch_lr = lr_at(cfg, epoch, 0, steps_per_epoch);
    for (int step = 0; step < steps_per_epoch; ++step) {
      const std::size_t begin = static_cast<std::size_t>(step) * batch;
      const std::size_t end = std::min(n, begin + batch);
      const double scale = 1.0 / static_cast<double>(end - begin);
      try {
        parallel_for(static_cast<std::size_t>(kGradientLanes), options.threads, [&](std::size_t lane) {
          for (auto& gm : lanes[lane]) gm.setZero();
          for (std::size_t b = begin + lane; b < end; b += kGradientLanes) {
            const PreparedGraph& g = train_set[order[b]];
            const ForwardCache cache = forward(g, params);
            const double err = cache.prediction - *g.target;
            epoch_errors[b] = std::abs(err);
            backward(cache, sign(err) * scale, params, lanes[lane]);
          }
        });
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " at step " + std::to_string(result.steps) + " (epoch " +
                             std::to_string(epoch) + ")");
      }
      double loss = 0.0;
      for (std::size_t b = begin; b < end; ++b) loss += epoch_errors[b];
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite loss at step " + std::to_string(result.steps) + " (epoch " +
                             std::to_string(epoch) + ")");
      }
      for (std::size_t i = 0; i < total.size(); ++i) {
        total[i] = lanes[0][i];
        for (int l = 1; l < kGradientLanes; ++l) total[i] += lanes[static_cast<std::size_t>(l)][i];
      }
      adam_step(params, total, opt, lr_at(cfg, epoch, step, steps_per_epoch));
      ++result.steps;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = epoch_lr;
    std::vector<double> zeros(n, 0.0);
    rec.train_mae = mean_absolute_error(epoch_errors, zeros);
    double score = rec.train_mae;
    if (!valid_set.empty()) {
      std::vector<double> targets;
      for (const auto& g : valid_set) targets.push_back(*g.target);
      rec.valid_mae = mean_absolute_error(predict_all(params, valid_set, options.threads), targets);
      score = *rec.valid_mae;
    }
    if (!std::isfinite(score)) throw NumericalError("non-finite validation MAE after epoch " + std::to_string(epoch));
    if (score < best_score) {
      best_score = score;
      result.best = params;
      result.best_epoch = epoch;
    }
    result.log.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  }
  result.last = std::move(params);
  if (result.best_epoch < 0) result.best = result.last;
  return result;
}

std::string epoch_log_csv(const std::vector<EpochRecord>& log) {
  std::string out = "epoch,lr,train_mae,valid_mae\n";
  for (const auto& r : log) {
    out += std::to_string(r.epoch) + "," + format_double17(r.lr) + "," + format_double17(r.train_mae) + ",";
    if (r.valid_mae) out += format_double17(*r.valid_mae);
    out += '\n';
  }
  return out;
}

}  // namespace sphmp
