// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/config.hpp"
#include "sphmp/synthetic.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sphmp {

inline constexpr std::array<AblationMode, 3> kAblationModes = {AblationMode::Full, AblationMode::NoTorsion,
                                                               AblationMode::NoAngleTorsion};

/// Desk-scale model for the synthetic chains: the cutoff keeps every 1-3 pair of
/// the chain, so each central atom has two off-axis neighbors and a defined torsion.
RunConfig ablation_config();

struct AblationSettings {
  SyntheticTask task = SyntheticTask::Torsion;
  int epochs = 200;
  int seeds = 3;
  int n_train = 512;
  int n_test = 128;
  std::uint64_t base_seed = 0;
  int threads = 1;
};

struct AblationRow {
  std::uint64_t seed = 0;
  std::array<double, 3> test_mae{};  // kAblationModes order
};

struct AblationReport {
  SyntheticTask task = SyntheticTask::Torsion;
  std::vector<AblationRow> rows;
  std::array<double, 3> median{};
};

/// Per seed: one dataset of n_train + n_test chains, the same split and
/// initialization seed for every mode; test MAE of the final parameters.
AblationReport run_ablation(const RunConfig& base, const AblationSettings& settings);

/// CSV with a header, one row per seed and a final `median` row.
std::string to_table(const AblationReport& report);

}  // namespace sphmp
