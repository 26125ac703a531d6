// SPDX-License-Identifier: Apache-2.0
#include "sphmp/ablation.hpp"

#include "sphmp/metrics.hpp"
#include "sphmp/train.hpp"

#include <algorithm>
#include <stdexcept>

namespace sphmp {

RunConfig ablation_config() {
  RunConfig c;
  c.cutoff_c = 2.0;
  c.n_srbf = 6;
  c.n_shbf = 7;
  c.num_interaction_blocks = 2;
  c.embed_size = 16;
  c.output_embed_size = 16;
  c.lb2_intermediate_distance = 8;
  c.lb2_intermediate_angle = 8;
  c.lb2_intermediate_torsion = 8;
  c.num_residual_blocks = 2;
  c.batch_size = 32;
  c.init_lr = 2e-3;
  c.schedule = LrSchedule::Cosine;
  c.warmup_epochs = 3;
  c.max_epochs = 200;
  c.valid_fraction = 0.0;
  return c;
}

AblationReport run_ablation(const RunConfig& base, const AblationSettings& s) {
  if (s.seeds < 1 || s.epochs < 1 || s.n_train < 1 || s.n_test < 1) {
    throw std::invalid_argument("ablation: seeds, epochs and set sizes must be positive");
  }
  AblationReport report;
  report.task = s.task;
  for (int k = 0; k < s.seeds; ++k) {
    const std::uint64_t seed = s.base_seed + static_cast<std::uint64_t>(k);
    const auto data = synthetic_torsion_task(s.n_train + s.n_test, seed, s.task);
    const std::vector<Graph3D> train_graphs(data.begin(), data.begin() + s.n_train);
    const std::vector<Graph3D> test_graphs(data.begin() + s.n_train, data.end());
    AblationRow row;
    row.seed = seed;
    for (std::size_t m = 0; m < kAblationModes.size(); ++m) {
      RunConfig cfg = base;
      cfg.ablation_mode = kAblationModes[m];
      cfg.max_epochs = s.epochs;
      cfg.seed = seed;
      const auto train_set = prepare_dataset(train_graphs, cfg, s.threads);
      const auto test_set = prepare_dataset(test_graphs, cfg, s.threads);
      TrainOptions opts;
      opts.threads = s.threads;
      const auto result = train_prepared(train_set, {}, cfg, seed, opts);
      std::vector<double> targets;
      for (const auto& g : test_set) targets.push_back(*g.target);
      row.test_mae[m] = mean_absolute_error(predict_all(result.last, test_set, s.threads), targets);
    }
    report.rows.push_back(row);
  }
  for (std::size_t m = 0; m < 3; ++m) {
    std::vector<double> v;
    for (const auto& r : report.rows) v.push_back(r.test_mae[m]);
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    report.median[m] = v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  }
  return report;
}

std::string to_table(const AblationReport& r) {
  std::string out = "task,seed";
  for (auto mode : kAblationModes) out += "," + std::string(to_string(mode));
  out += '\n';
  auto cells = [](const std::array<double, 3>& v) {
    std::string s;
    for (double x : v) s += "," + format_double17(x);
    return s;
  };
  for (const auto& row : r.rows) out += std::string(to_string(r.task)) + "," + std::to_string(row.seed) + cells(row.test_mae) + "\n";
  out += std::string(to_string(r.task)) + ",median" + cells(r.median) + "\n";
  return out;
}

}  // namespace sphmp
