// SPDX-License-Identifier: Apache-2.0
#include "sphmp/config.hpp"

#include "sphmp/error.hpp"
#include "sphmp/ingest.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sphmp {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

int to_int(std::string_view key, std::string_view v) {
  const auto x = parse_integer(v);
  if (!x || *x < INT32_MIN || *x > INT32_MAX) throw DataError("config key '" + std::string(key) + "': expected integer, got '" + std::string(v) + "'");
  return static_cast<int>(*x);
}

double to_real(std::string_view key, std::string_view v) {
  const auto x = parse_double(v);
  if (!x || !std::isfinite(*x)) throw DataError("config key '" + std::string(key) + "': expected finite real, got '" + std::string(v) + "'");
  return *x;
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"cutoff_c", [](RunConfig& c, std::string_view v) { c.cutoff_c = to_real("cutoff_c", v); }},
      {"n_srbf", [](RunConfig& c, std::string_view v) { c.n_srbf = to_int("n_srbf", v); }},
      {"n_shbf", [](RunConfig& c, std::string_view v) { c.n_shbf = to_int("n_shbf", v); }},
      {"num_interaction_blocks", [](RunConfig& c, std::string_view v) { c.num_interaction_blocks = to_int("num_interaction_blocks", v); }},
      {"embed_size", [](RunConfig& c, std::string_view v) { c.embed_size = to_int("embed_size", v); }},
      {"lb2_intermediate_distance", [](RunConfig& c, std::string_view v) { c.lb2_intermediate_distance = to_int("lb2_intermediate_distance", v); }},
      {"lb2_intermediate_angle", [](RunConfig& c, std::string_view v) { c.lb2_intermediate_angle = to_int("lb2_intermediate_angle", v); }},
      {"lb2_intermediate_torsion", [](RunConfig& c, std::string_view v) { c.lb2_intermediate_torsion = to_int("lb2_intermediate_torsion", v); }},
      {"output_embed_size", [](RunConfig& c, std::string_view v) { c.output_embed_size = to_int("output_embed_size", v); }},
      {"num_residual_blocks", [](RunConfig& c, std::string_view v) { c.num_residual_blocks = to_int("num_residual_blocks", v); }},
      {"batch_size", [](RunConfig& c, std::string_view v) { c.batch_size = to_int("batch_size", v); }},
      {"init_lr", [](RunConfig& c, std::string_view v) { c.init_lr = to_real("init_lr", v); }},
      {"schedule", [](RunConfig& c, std::string_view v) {
         if (v == "step") c.schedule = LrSchedule::Step;
         else if (v == "cosine") c.schedule = LrSchedule::Cosine;
         else throw DataError("config key 'schedule': expected step or cosine, got '" + std::string(v) + "'");
       }},
      {"decay_ratio", [](RunConfig& c, std::string_view v) { c.decay_ratio = to_real("decay_ratio", v); }},
      {"step_size", [](RunConfig& c, std::string_view v) { c.step_size = to_int("step_size", v); }},
      {"t_max", [](RunConfig& c, std::string_view v) { c.t_max = to_int("t_max", v); }},
      {"warmup_epochs", [](RunConfig& c, std::string_view v) { c.warmup_epochs = to_int("warmup_epochs", v); }},
      {"warmup_factor", [](RunConfig& c, std::string_view v) { c.warmup_factor = to_real("warmup_factor", v); }},
      {"max_epochs", [](RunConfig& c, std::string_view v) { c.max_epochs = to_int("max_epochs", v); }},
      {"valid_fraction", [](RunConfig& c, std::string_view v) { c.valid_fraction = to_real("valid_fraction", v); }},
      {"ablation_mode", [](RunConfig& c, std::string_view v) { c.ablation_mode = parse_ablation_mode(v); }},
      {"seed", [](RunConfig& c, std::string_view v) {
         const auto x = parse_integer(v);
         if (!x || *x < 0) throw DataError("config key 'seed': expected non-negative integer");
         c.seed = static_cast<std::uint64_t>(*x);
       }},
      {"ewt_threshold", [](RunConfig& c, std::string_view v) { c.ewt_threshold = to_real("ewt_threshold", v); }},
  };
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DataError("config out of range: " + what);
}

}  // namespace

std::string_view to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::Full: return "FULL";
    case AblationMode::NoTorsion: return "NO_TORSION";
    case AblationMode::NoAngleTorsion: return "NO_ANGLE_TORSION";
  }
  return "FULL";
}

AblationMode parse_ablation_mode(std::string_view text) {
  if (text == "FULL") return AblationMode::Full;
  if (text == "NO_TORSION") return AblationMode::NoTorsion;
  if (text == "NO_ANGLE_TORSION") return AblationMode::NoAngleTorsion;
  throw DataError("unknown ablation mode '" + std::string(text) + "' (expected FULL, NO_TORSION or NO_ANGLE_TORSION)");
}

std::string_view to_string(LrSchedule s) { return s == LrSchedule::Step ? "step" : "cosine"; }

void validate(const RunConfig& c) {
  require(c.cutoff_c > 0, "cutoff_c must be > 0");
  require(c.n_srbf >= 1 && c.n_srbf <= 64, "n_srbf must be in [1, 64]");
  require(c.n_shbf >= 1 && c.n_shbf <= 17, "n_shbf must be in [1, 17]");
  require(c.num_interaction_blocks >= 0, "num_interaction_blocks must be >= 0");
  require(c.embed_size >= 1, "embed_size must be >= 1");
  require(c.lb2_intermediate_distance >= 1 && c.lb2_intermediate_angle >= 1 && c.lb2_intermediate_torsion >= 1,
          "lb2 intermediate sizes must be >= 1");
  require(c.output_embed_size >= 1, "output_embed_size must be >= 1");
  require(c.num_residual_blocks >= 0, "num_residual_blocks must be >= 0");
  require(c.batch_size >= 1, "batch_size must be >= 1");
  require(c.init_lr > 0, "init_lr must be > 0");
  require(c.decay_ratio > 0 && c.decay_ratio <= 1, "decay_ratio must be in (0, 1]");
  require(c.step_size >= 1, "step_size must be >= 1");
  require(c.t_max >= 0, "t_max must be >= 0");
  require(c.warmup_epochs >= 0, "warmup_epochs must be >= 0");
  require(c.warmup_factor > 0 && c.warmup_factor <= 1, "warmup_factor must be in (0, 1]");
  require(c.max_epochs >= 1, "max_epochs must be >= 1");
  require(c.valid_fraction >= 0 && c.valid_fraction < 1, "valid_fraction must be in [0, 1)");
  require(c.ewt_threshold > 0, "ewt_threshold must be > 0");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) {
        throw DataError("config line " + std::to_string(line_no) + ": expected 'key: value'");
      }
      const auto key = trim(line.substr(0, colon));
      const auto value = trim(line.substr(colon + 1));
      const auto it = setters().find(key);
      if (it == setters().end()) {
        throw DataError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
      }
      it->second(cfg, value);
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "cutoff_c: " << format_double(c.cutoff_c) << "\n"
    << "n_srbf: " << c.n_srbf << "\n"
    << "n_shbf: " << c.n_shbf << "\n"
    << "num_interaction_blocks: " << c.num_interaction_blocks << "\n"
    << "embed_size: " << c.embed_size << "\n"
    << "lb2_intermediate_distance: " << c.lb2_intermediate_distance << "\n"
    << "lb2_intermediate_angle: " << c.lb2_intermediate_angle << "\n"
    << "lb2_intermediate_torsion: " << c.lb2_intermediate_torsion << "\n"
    << "output_embed_size: " << c.output_embed_size << "\n"
    << "num_residual_blocks: " << c.num_residual_blocks << "\n"
    << "batch_size: " << c.batch_size << "\n"
    << "init_lr: " << format_double(c.init_lr) << "\n"
    << "schedule: " << to_string(c.schedule) << "\n"
    << "decay_ratio: " << format_double(c.decay_ratio) << "\n"
    << "step_size: " << c.step_size << "\n"
    << "t_max: " << c.t_max << "\n"
    << "warmup_epochs: " << c.warmup_epochs << "\n"
    << "warmup_factor: " << format_double(c.warmup_factor) << "\n"
    << "max_epochs: " << c.max_epochs << "\n"
    << "valid_fraction: " << format_double(c.valid_fraction) << "\n"
    << "ablation_mode: " << to_string(c.ablation_mode) << "\n"
    << "seed: " << c.seed << "\n"
    << "ewt_threshold: " << format_double(c.ewt_threshold) << "\n";
  return o.str();
}

bool architecture_matches(const RunConfig& a, const RunConfig& b) {
  return a.cutoff_c == b.cutoff_c && a.n_srbf == b.n_srbf && a.n_shbf == b.n_shbf &&
         a.num_interaction_blocks == b.num_interaction_blocks && a.embed_size == b.embed_size &&
         a.lb2_intermediate_distance == b.lb2_intermediate_distance &&
         a.lb2_intermediate_angle == b.lb2_intermediate_angle &&
         a.lb2_intermediate_torsion == b.lb2_intermediate_torsion &&
         a.output_embed_size == b.output_embed_size && a.num_residual_blocks == b.num_residual_blocks &&
         a.ablation_mode == b.ablation_mode;
}

}  // namespace sphmp
