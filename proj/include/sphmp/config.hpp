// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sphmp {

/// Which two-hop geometry enters the interaction blocks.
enum class AblationMode {
  Full,            // distance, angle and torsion
  NoTorsion,       // distance and angle
  NoAngleTorsion,  // distance only
};

enum class LrSchedule { Step, Cosine };

std::string_view to_string(AblationMode mode);
AblationMode parse_ablation_mode(std::string_view text);
std::string_view to_string(LrSchedule s);

struct RunConfig {
  double cutoff_c = 5.0;  // Å
  int n_srbf = 6;
  int n_shbf = 7;
  int num_interaction_blocks = 4;
  int embed_size = 256;
  int lb2_intermediate_distance = 8;
  int lb2_intermediate_angle = 8;
  int lb2_intermediate_torsion = 8;
  int output_embed_size = 64;
  int num_residual_blocks = 2;

  int batch_size = 32;
  double init_lr = 5e-4;
  LrSchedule schedule = LrSchedule::Step;
  double decay_ratio = 0.5;
  int step_size = 50;
  int t_max = 0;  // 0 means max_epochs
  int warmup_epochs = 3;
  double warmup_factor = 0.2;
  int max_epochs = 100;
  double valid_fraction = 0.1;

  AblationMode ablation_mode = AblationMode::Full;
  std::uint64_t seed = 0;
  double ewt_threshold = 0.02;  // eV

  int effective_t_max() const { return t_max > 0 ? t_max : max_epochs; }
};

/// Throws DataError naming the offending field.
void validate(const RunConfig& cfg);

/// Flat `key: value` document; `#` starts a comment; unspecified keys keep defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_text(const RunConfig& cfg);

/// True when two configs produce identically shaped models that interpret
/// geometry the same way (cutoff, basis sizes, widths, depth, ablation mode).
bool architecture_matches(const RunConfig& a, const RunConfig& b);

}  // namespace sphmp
