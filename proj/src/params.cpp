// SPDX-License-Identifier: Apache-2.0
#include "sphmp/params.hpp"

#include "sphmp/ingest.hpp"
#include "sphmp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sphmp {

ModelParams::ModelParams(const RunConfig& cfg) : config_(cfg) {
  validate(cfg);
  const int E = cfg.embed_size;
  const int O = cfg.output_embed_size;
  const int nr = cfg.n_srbf;
  const int ns = cfg.n_shbf;

  auto& emb = layout_.embedding;
  emb.atom_table = add("embedding.atom_table", kMaxAtomicNumber + 1, E);
  emb.distance = block2("embedding.distance", nr, cfg.lb2_intermediate_distance, E);
  emb.merge = dense("embedding.merge", 3 * E, E, true);

  for (int b = 0; b < cfg.num_interaction_blocks; ++b) {
    const std::string p = "interaction" + std::to_string(b) + ".";
    InteractionLayout blk;
    blk.self_transform = dense(p + "self", E, E, true);
    blk.neighbor_transform = dense(p + "neighbor", E, E, true);
    blk.distance = block2(p + "distance", nr, cfg.lb2_intermediate_distance, E);
    blk.down = dense(p + "down", E, O, false);
    blk.angle = block2(p + "angle", nr * ns, cfg.lb2_intermediate_angle, O);
    blk.torsion = block2(p + "torsion", nr * ns * ns, cfg.lb2_intermediate_torsion, O);
    blk.up = dense(p + "up", O, E, false);
    blk.skip = dense(p + "skip", E, E, true);
    for (int r = 0; r < cfg.num_residual_blocks; ++r) {
      const std::string rp = p + "residual" + std::to_string(r) + ".";
      blk.residual.push_back({dense(rp + "first", E, E, true), dense(rp + "second", E, E, true)});
    }
    layout_.interactions.push_back(std::move(blk));
  }

  auto& out = layout_.output;
  out.distance = block2("output.distance", nr, cfg.lb2_intermediate_distance, E);
  out.node = dense("output.node", E, E, true);
  out.hidden = dense("output.hidden", E, E, true);
  out.readout = dense("output.readout", E, 1, true);

  audit_shapes();
}

std::size_t ModelParams::add(std::string name, int rows, int cols) {
  names_.push_back(std::move(name));
  values_.push_back(Mat::Zero(rows, cols));
  grads_.push_back(Mat::Zero(rows, cols));
  expected_shapes_.emplace_back(rows, cols);
  return values_.size() - 1;
}

Dense ModelParams::dense(const std::string& name, int in, int out, bool bias) {
  Dense d;
  d.in = in;
  d.out = out;
  d.weight = add(name + ".weight", out, in);
  if (bias) d.bias = add(name + ".bias", 1, out);
  return d;
}

LinearBlock2 ModelParams::block2(const std::string& name, int in, int mid, int out) {
  return {dense(name + ".down", in, mid, false), dense(name + ".up", mid, out, false)};
}

std::size_t ModelParams::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw std::out_of_range("no parameter tensor named '" + name + "'");
}

std::size_t ModelParams::num_scalars() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

Gradients ModelParams::zero_gradients() const {
  Gradients g;
  g.reserve(values_.size());
  for (const auto& v : values_) g.push_back(Mat::Zero(v.rows(), v.cols()));
  return g;
}

void ModelParams::zero_grad() {
  for (auto& g : grads_) g.setZero();
}

void ModelParams::audit_shapes() const {
  if (values_.size() != expected_shapes_.size() || grads_.size() != values_.size()) {
    throw std::logic_error("parameter/gradient tensor count mismatch");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const auto [r, c] = expected_shapes_[i];
    if (values_[i].rows() != r || values_[i].cols() != c || grads_[i].rows() != r || grads_[i].cols() != c) {
      throw std::logic_error("shape audit failed for tensor '" + names_[i] + "'");
    }
  }
}

ModelParams init_params(const RunConfig& cfg, std::uint64_t seed) {
  ModelParams params(cfg);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& name = params.name(i);
    Mat& v = params.value(i);
    if (name.size() >= 5 && name.compare(name.size() - 5, 5, ".bias") == 0) continue;  // stays zero
    const double bound = i == params.layout().embedding.atom_table ? 1.0 : 1.0 / std::sqrt(static_cast<double>(v.cols()));
    CounterRng rng(seed, name);
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) v(r, c) = rng.uniform(-bound, bound);
    }
  }
  return params;
}

}  // namespace sphmp
