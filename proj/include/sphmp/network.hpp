// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sphmp/basis.hpp"
#include "sphmp/config.hpp"
#include "sphmp/geometry.hpp"
#include "sphmp/ingest.hpp"
#include "sphmp/params.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sphmp {

/// Geometry and basis values of one graph. These are constants of the network
/// (no coordinate gradients), so they are computed once per graph and reused.
struct PreparedGraph {
  std::string id;
  std::vector<int> atomic_numbers;
  DirectedEdgeList edges;
  TwoHopGeometry geometry;
  Mat rbf;  // edges x N_SRBF, at d_k
  Mat sbf;  // pairs x N_SRBF N_SHBF, at (d_j, θ_kj)
  Mat tbf;  // pairs x N_SRBF N_SHBF^2, at (d_j, θ_kj, φ_kj)
  std::optional<double> target;

  std::size_t num_nodes() const { return atomic_numbers.size(); }
};

PreparedGraph prepare_graph(const Graph3D& g, const BasisTables& tables);

/// Edge messages e_k, one row per directed edge.
struct MessageState {
  Mat messages;
  int layer = 0;
};

struct EmbeddingCache {
  Mat rbf_hidden;
  Mat rbf_embed;
  Mat concat;
  Mat pre;
  Mat out;
};

struct ResidualCache {
  Mat input;
  Mat pre1;
  Mat act1;
  Mat pre2;
};

struct InteractionCache {
  Mat input;
  Mat self_pre;
  Mat self_act;
  Mat neighbor_pre;
  Mat neighbor_act;
  Mat distance_hidden;
  Mat distance_gate;
  Mat gated;
  Mat down_pre;
  Mat down_act;
  Mat angle_hidden;
  Mat angle_gate;
  Mat torsion_hidden;
  Mat torsion_gate;
  Mat geometry_gate;  // empty when no angular geometry is used
  Mat aggregate;
  Mat up_pre;
  Mat combined;
  Mat skip_pre;
  std::vector<ResidualCache> residual;
  Mat output;
};

struct OutputCache {
  Mat rbf_hidden;
  Mat rbf_gate;
  Mat gated;
  Mat node_aggregate;
  Mat node_pre;
  Mat node_act;
  Mat hidden_pre;
  Mat hidden_act;
  Mat atom_energy;  // nodes x 1
  double energy = 0.0;
};

/// Everything backward() needs. Holds a pointer to the prepared graph, which must
/// outlive the cache.
struct ForwardCache {
  const PreparedGraph* graph = nullptr;
  AblationMode mode = AblationMode::Full;
  EmbeddingCache embedding;
  std::vector<InteractionCache> interactions;
  OutputCache output;
  double prediction = 0.0;
};

/// Smooth self-gated activation x * sigmoid(x).
double swish(double x);
double swish_grad(double x);

MessageState embedding_block(const PreparedGraph& g, const ModelParams& params, EmbeddingCache* cache = nullptr);

/// Updates e_k from the messages of the incoming edges of s_k, gated by the encoded
/// two-hop geometry selected by mode, plus a residual transform of e_k itself.
MessageState interaction_block(const MessageState& state, const PreparedGraph& g, const ModelParams& params,
                               int block, AblationMode mode, InteractionCache* cache = nullptr);

struct OutputResult {
  Mat node_features;  // v'_i
  double energy = 0.0;  // u'
};

OutputResult output_block(const MessageState& state, const PreparedGraph& g, const ModelParams& params,
                          OutputCache* cache = nullptr);

/// Embedding block, every interaction block, output block. Throws NumericalError
/// naming the block when an intermediate is non-finite.
ForwardCache forward(const PreparedGraph& g, const ModelParams& params, AblationMode mode);
ForwardCache forward(const PreparedGraph& g, const ModelParams& params);
double predict(const PreparedGraph& g, const ModelParams& params);

/// Accumulates d(upstream * prediction)/d(params) into grads.
void backward(const ForwardCache& cache, double upstream, const ModelParams& params, Gradients& grads);
/// Accumulates into params' own gradient buffers.
void backward(const ForwardCache& cache, double upstream, ModelParams& params);

struct FilterGrid {
  std::vector<double> distances;
  std::vector<double> thetas;
  std::vector<double> phis;
  int block = 0;
  std::vector<int> channels;  // empty: all output_embed_size channels
};

struct FilterTable {
  std::vector<int> channels;
  std::vector<std::array<double, 3>> points;  // (d, θ, φ)
  Mat values;                                  // points x channels
};

/// Torsion LB2 of one interaction block evaluated on t̃_BF over a (d, θ, φ) grid.
FilterTable export_filters(const ModelParams& params, const FilterGrid& grid);
std::string filters_to_csv(const FilterTable& table);

}  // namespace sphmp
