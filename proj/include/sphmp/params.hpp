// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/config.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace sphmp {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One gradient tensor per parameter tensor, same order and shapes.
using Gradients = std::vector<Mat>;

inline constexpr std::size_t kNoTensor = static_cast<std::size_t>(-1);

/// Affine map y = W x (+ b). W has shape (out, in); b, when present, (1, out).
struct Dense {
  std::size_t weight = kNoTensor;
  std::size_t bias = kNoTensor;
  int in = 0;
  int out = 0;
};

/// Bottleneck block: bias-free down-projection then bias-free up-projection.
struct LinearBlock2 {
  Dense down;
  Dense up;
};

struct ResidualLayout {
  Dense first;
  Dense second;
};

struct EmbeddingLayout {
  std::size_t atom_table = kNoTensor;  // (kMaxAtomicNumber + 1) x embed
  LinearBlock2 distance;                // N_SRBF -> embed
  Dense merge;                          // 3 embed -> embed
};

struct InteractionLayout {
  Dense self_transform;   // embed -> embed
  Dense neighbor_transform;
  LinearBlock2 distance;  // N_SRBF -> embed
  Dense down;             // embed -> output_embed, no bias
  LinearBlock2 angle;     // N_SRBF N_SHBF -> output_embed
  LinearBlock2 torsion;   // N_SRBF N_SHBF^2 -> output_embed
  Dense up;               // output_embed -> embed, no bias
  Dense skip;             // embed -> embed
  std::vector<ResidualLayout> residual;
};

struct OutputLayout {
  LinearBlock2 distance;  // N_SRBF -> embed
  Dense node;             // embed -> embed
  Dense hidden;           // embed -> embed
  Dense readout;          // embed -> 1
};

struct NetworkLayout {
  EmbeddingLayout embedding;
  std::vector<InteractionLayout> interactions;
  OutputLayout output;
};

/// Named parameter tensors of the network, their gradient buffers, and the
/// layout that tells each block where its tensors live. Shapes are fixed by the
/// RunConfig given at construction.
class ModelParams {
 public:
  /// Zero-initialized parameters shaped for cfg.
  explicit ModelParams(const RunConfig& cfg);

  const RunConfig& config() const { return config_; }
  const NetworkLayout& layout() const { return layout_; }

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Mat& value(std::size_t i) { return values_[i]; }
  const Mat& value(std::size_t i) const { return values_[i]; }
  Mat& grad(std::size_t i) { return grads_[i]; }
  const Mat& grad(std::size_t i) const { return grads_[i]; }
  Gradients& grads() { return grads_; }
  const Gradients& grads() const { return grads_; }

  /// Throws std::out_of_range for an unknown name.
  std::size_t index_of(const std::string& name) const;
  std::size_t num_scalars() const;

  Gradients zero_gradients() const;
  void zero_grad();

  /// Throws std::logic_error when any tensor deviates from the shape cfg implies.
  void audit_shapes() const;

 private:
  std::size_t add(std::string name, int rows, int cols);
  Dense dense(const std::string& name, int in, int out, bool bias);
  LinearBlock2 block2(const std::string& name, int in, int mid, int out);

  RunConfig config_;
  NetworkLayout layout_;
  std::vector<std::string> names_;
  std::vector<Mat> values_;
  std::vector<Mat> grads_;
  std::vector<std::pair<int, int>> expected_shapes_;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero, atom table ~ U(-1, 1).
/// Deterministic in (cfg, seed) on every platform.
ModelParams init_params(const RunConfig& cfg, std::uint64_t seed);

}  // namespace sphmp
