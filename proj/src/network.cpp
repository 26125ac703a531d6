// SPDX-License-Identifier: Apache-2.0
#include "sphmp/network.hpp"

#include "sphmp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace sphmp {
namespace {

Mat linear(const Mat& x, const Dense& d, const ModelParams& p) {
  Mat y = x * p.value(d.weight).transpose();
  if (d.bias != kNoTensor) y.rowwise() += p.value(d.bias).row(0);
  return y;
}

// Accumulates parameter gradients of y = linear(x); returns dL/dx.
Mat linear_backward(const Mat& x, const Mat& dy, const Dense& d, const ModelParams& p, Gradients& g) {
  g[d.weight].noalias() += dy.transpose() * x;
  if (d.bias != kNoTensor) g[d.bias].row(0) += dy.colwise().sum();
  return dy * p.value(d.weight);
}

void linear_backward_no_input(const Mat& x, const Mat& dy, const Dense& d, Gradients& g) {
  g[d.weight].noalias() += dy.transpose() * x;
  if (d.bias != kNoTensor) g[d.bias].row(0) += dy.colwise().sum();
}

Mat activate(const Mat& x) { return x.unaryExpr([](double v) { return swish(v); }); }

Mat activate_backward(const Mat& pre, const Mat& dy) {
  return dy.cwiseProduct(pre.unaryExpr([](double v) { return swish_grad(v); }));
}

void check_finite(const Mat& m, const std::string& where) {
  if (!m.allFinite()) throw NumericalError("non-finite activation in " + where);
}

void check_compatible(const PreparedGraph& g, const ModelParams& params) {
  const auto& cfg = params.config();
  if (g.rbf.rows() != static_cast<Eigen::Index>(g.edges.size()) || g.rbf.cols() != cfg.n_srbf ||
      g.sbf.rows() != static_cast<Eigen::Index>(g.geometry.pairs.size()) || g.sbf.cols() != cfg.n_srbf * cfg.n_shbf ||
      g.tbf.rows() != g.sbf.rows() || g.tbf.cols() != cfg.n_srbf * cfg.n_shbf * cfg.n_shbf) {
    throw std::invalid_argument("prepared graph '" + g.id + "' does not match the model's basis sizes");
  }
}

}  // namespace

double swish(double x) { return x / (1.0 + std::exp(-x)); }

double swish_grad(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s + x * s * (1.0 - s);
}

PreparedGraph prepare_graph(const Graph3D& g, const BasisTables& tables) {
  PreparedGraph out;
  out.id = g.id;
  out.atomic_numbers = g.atomic_numbers;
  out.target = g.graph_target;
  out.edges = build_radius_graph(g, tables.cutoff());
  out.geometry = compute_two_hop_geometry(g, out.edges);

  const auto m = static_cast<Eigen::Index>(out.edges.size());
  out.rbf.resize(m, tables.rbf_size());
  for (Eigen::Index k = 0; k < m; ++k) {
    rbf_embed(out.edges.distances[static_cast<std::size_t>(k)], tables,
              std::span<double>(out.rbf.row(k).data(), static_cast<std::size_t>(tables.rbf_size())));
  }
  const auto& pairs = out.geometry.pairs;
  const auto np = static_cast<Eigen::Index>(pairs.size());
  out.sbf.resize(np, tables.sbf_size());
  out.tbf.resize(np, tables.tbf_size());
  for (Eigen::Index p = 0; p < np; ++p) {
    const auto pi = static_cast<std::size_t>(p);
    angular_embeds(out.edges.distances[pairs.edge_j[pi]], out.geometry.theta[pi], out.geometry.phi[pi], tables,
                   std::span<double>(out.sbf.row(p).data(), static_cast<std::size_t>(tables.sbf_size())),
                   std::span<double>(out.tbf.row(p).data(), static_cast<std::size_t>(tables.tbf_size())));
  }
  return out;
}

MessageState embedding_block(const PreparedGraph& g, const ModelParams& params, EmbeddingCache* cache) {
  const auto& L = params.layout().embedding;
  const int E = params.config().embed_size;
  const auto m = static_cast<Eigen::Index>(g.edges.size());
  const Mat& table = params.value(L.atom_table);

  EmbeddingCache local;
  EmbeddingCache& c = cache ? *cache : local;
  c.rbf_hidden = linear(g.rbf, L.distance.down, params);
  c.rbf_embed = linear(c.rbf_hidden, L.distance.up, params);
  c.concat.resize(m, 3 * E);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    c.concat.row(k).segment(0, E) = table.row(g.atomic_numbers[static_cast<std::size_t>(g.edges.senders[ku])]);
    c.concat.row(k).segment(E, E) = table.row(g.atomic_numbers[static_cast<std::size_t>(g.edges.receivers[ku])]);
    c.concat.row(k).segment(2 * E, E) = c.rbf_embed.row(k);
  }
  c.pre = linear(c.concat, L.merge, params);
  c.out = activate(c.pre);
  return {c.out, 0};
}

MessageState interaction_block(const MessageState& state, const PreparedGraph& g, const ModelParams& params,
                               int block, AblationMode mode, InteractionCache* cache) {
  if (block < 0 || block >= static_cast<int>(params.layout().interactions.size())) {
    throw std::out_of_range("interaction block index out of range");
  }
  const auto& pairs = g.geometry.pairs;
  if (state.messages.rows() != static_cast<Eigen::Index>(g.edges.size()) ||
      pairs.offsets.size() != g.edges.size() + 1) {
    throw std::invalid_argument("message state and two-hop index disagree on the edge count");
  }
  const auto& L = params.layout().interactions[static_cast<std::size_t>(block)];
  const int O = params.config().output_embed_size;

  InteractionCache local;
  InteractionCache& c = cache ? *cache : local;
  c.input = state.messages;
  const Mat& e = c.input;

  c.self_pre = linear(e, L.self_transform, params);
  c.self_act = activate(c.self_pre);
  c.neighbor_pre = linear(e, L.neighbor_transform, params);
  c.neighbor_act = activate(c.neighbor_pre);
  c.distance_hidden = linear(g.rbf, L.distance.down, params);
  c.distance_gate = linear(c.distance_hidden, L.distance.up, params);
  c.gated = c.neighbor_act.cwiseProduct(c.distance_gate);
  c.down_pre = linear(c.gated, L.down, params);
  c.down_act = activate(c.down_pre);

  c.geometry_gate.resize(0, 0);
  if (mode != AblationMode::NoAngleTorsion) {
    c.angle_hidden = linear(g.sbf, L.angle.down, params);
    c.angle_gate = linear(c.angle_hidden, L.angle.up, params);
    c.geometry_gate = c.angle_gate;
    if (mode == AblationMode::Full) {
      c.torsion_hidden = linear(g.tbf, L.torsion.down, params);
      c.torsion_gate = linear(c.torsion_hidden, L.torsion.up, params);
      c.geometry_gate += c.torsion_gate;
    }
  }

  c.aggregate = Mat::Zero(e.rows(), O);
  const bool gated = c.geometry_gate.size() > 0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto k = static_cast<Eigen::Index>(pairs.edge_k[p]);
    const auto j = static_cast<Eigen::Index>(pairs.edge_j[p]);
    if (gated) {
      c.aggregate.row(k) += c.down_act.row(j).cwiseProduct(c.geometry_gate.row(static_cast<Eigen::Index>(p)));
    } else {
      c.aggregate.row(k) += c.down_act.row(j);
    }
  }
  c.up_pre = linear(c.aggregate, L.up, params);
  c.combined = c.self_act + activate(c.up_pre);
  c.skip_pre = linear(c.combined, L.skip, params);
  Mat h = activate(c.skip_pre) + e;

  c.residual.resize(L.residual.size());
  for (std::size_t r = 0; r < L.residual.size(); ++r) {
    auto& rc = c.residual[r];
    rc.input = h;
    rc.pre1 = linear(h, L.residual[r].first, params);
    rc.act1 = activate(rc.pre1);
    rc.pre2 = linear(rc.act1, L.residual[r].second, params);
    h = rc.input + activate(rc.pre2);
  }
  c.output = h;
  return {std::move(h), state.layer + 1};
}

OutputResult output_block(const MessageState& state, const PreparedGraph& g, const ModelParams& params,
                          OutputCache* cache) {
  const auto& L = params.layout().output;
  const int E = params.config().embed_size;
  const auto n = static_cast<Eigen::Index>(g.num_nodes());

  OutputCache local;
  OutputCache& c = cache ? *cache : local;
  c.rbf_hidden = linear(g.rbf, L.distance.down, params);
  c.rbf_gate = linear(c.rbf_hidden, L.distance.up, params);
  c.gated = c.rbf_gate.cwiseProduct(state.messages);
  c.node_aggregate = Mat::Zero(n, E);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    c.node_aggregate.row(g.edges.receivers[k]) += c.gated.row(static_cast<Eigen::Index>(k));
  }
  c.node_pre = linear(c.node_aggregate, L.node, params);
  c.node_act = activate(c.node_pre);
  c.hidden_pre = linear(c.node_act, L.hidden, params);
  c.hidden_act = activate(c.hidden_pre);
  c.atom_energy = linear(c.hidden_act, L.readout, params);

  // Sum in ascending order so the pooled value depends only on the multiset of atom terms.
  std::vector<double> terms(c.atom_energy.data(), c.atom_energy.data() + c.atom_energy.size());
  std::sort(terms.begin(), terms.end());
  double u = 0.0;
  for (double t : terms) u += t;
  c.energy = u;
  return {c.node_act, u};
}

ForwardCache forward(const PreparedGraph& g, const ModelParams& params, AblationMode mode) {
  check_compatible(g, params);
  ForwardCache cache;
  cache.graph = &g;
  cache.mode = mode;
  MessageState state = embedding_block(g, params, &cache.embedding);
  check_finite(state.messages, "embedding block");
  const int blocks = static_cast<int>(params.layout().interactions.size());
  cache.interactions.resize(static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) {
    state = interaction_block(state, g, params, b, mode, &cache.interactions[static_cast<std::size_t>(b)]);
    check_finite(state.messages, "interaction block " + std::to_string(b));
  }
  const auto out = output_block(state, g, params, &cache.output);
  if (!std::isfinite(out.energy)) throw NumericalError("non-finite activation in output block");
  cache.prediction = out.energy;
  return cache;
}

ForwardCache forward(const PreparedGraph& g, const ModelParams& params) {
  return forward(g, params, params.config().ablation_mode);
}

double predict(const PreparedGraph& g, const ModelParams& params) { return forward(g, params).prediction; }

void backward(const ForwardCache& cache, double upstream, const ModelParams& params, Gradients& grads) {
  if (cache.graph == nullptr) throw std::invalid_argument("backward: no forward cache");
  if (grads.size() != params.size()) throw std::invalid_argument("backward: gradient buffer does not match params");
  const PreparedGraph& g = *cache.graph;
  const auto& layout = params.layout();
  const int E = params.config().embed_size;
  const auto m = static_cast<Eigen::Index>(g.edges.size());

  // Output block
  const auto& OL = layout.output;
  const auto& oc = cache.output;
  Mat d_atom = Mat::Constant(oc.atom_energy.rows(), 1, upstream);
  Mat d_hidden_act = linear_backward(oc.hidden_act, d_atom, OL.readout, params, grads);
  Mat d_hidden_pre = activate_backward(oc.hidden_pre, d_hidden_act);
  Mat d_node_act = linear_backward(oc.node_act, d_hidden_pre, OL.hidden, params, grads);
  Mat d_node_pre = activate_backward(oc.node_pre, d_node_act);
  Mat d_node_agg = linear_backward(oc.node_aggregate, d_node_pre, OL.node, params, grads);
  Mat d_gated(m, E);
  for (Eigen::Index k = 0; k < m; ++k) d_gated.row(k) = d_node_agg.row(g.edges.receivers[static_cast<std::size_t>(k)]);
  const Mat& final_messages = cache.interactions.empty() ? cache.embedding.out : cache.interactions.back().output;
  Mat d_rbf_gate = d_gated.cwiseProduct(final_messages);
  Mat d_e = d_gated.cwiseProduct(oc.rbf_gate);
  {
    Mat d_hidden = linear_backward(oc.rbf_hidden, d_rbf_gate, OL.distance.up, params, grads);
    linear_backward_no_input(g.rbf, d_hidden, OL.distance.down, grads);
  }

  // Interaction blocks, last to first
  const auto& pairs = g.geometry.pairs;
  for (std::size_t bi = cache.interactions.size(); bi-- > 0;) {
    const auto& L = layout.interactions[bi];
    const auto& c = cache.interactions[bi];

    Mat d_h = d_e;
    for (std::size_t r = L.residual.size(); r-- > 0;) {
      const auto& rc = c.residual[r];
      Mat d_pre2 = activate_backward(rc.pre2, d_h);
      Mat d_act1 = linear_backward(rc.act1, d_pre2, L.residual[r].second, params, grads);
      Mat d_pre1 = activate_backward(rc.pre1, d_act1);
      d_h += linear_backward(rc.input, d_pre1, L.residual[r].first, params, grads);
    }
    Mat d_in = d_h;  // skip connection: h1 = act(skip_pre) + e
    Mat d_skip_pre = activate_backward(c.skip_pre, d_h);
    Mat d_combined = linear_backward(c.combined, d_skip_pre, L.skip, params, grads);

    Mat d_self_pre = activate_backward(c.self_pre, d_combined);
    d_in += linear_backward(c.input, d_self_pre, L.self_transform, params, grads);

    Mat d_up_pre = activate_backward(c.up_pre, d_combined);
    Mat d_agg = linear_backward(c.aggregate, d_up_pre, L.up, params, grads);

    Mat d_down_act = Mat::Zero(c.down_act.rows(), c.down_act.cols());
    const bool gated = c.geometry_gate.size() > 0;
    Mat d_gate;
    if (gated) d_gate.resize(c.geometry_gate.rows(), c.geometry_gate.cols());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto k = static_cast<Eigen::Index>(pairs.edge_k[p]);
      const auto j = static_cast<Eigen::Index>(pairs.edge_j[p]);
      const auto pr = static_cast<Eigen::Index>(p);
      if (gated) {
        d_down_act.row(j) += d_agg.row(k).cwiseProduct(c.geometry_gate.row(pr));
        d_gate.row(pr) = d_agg.row(k).cwiseProduct(c.down_act.row(j));
      } else {
        d_down_act.row(j) += d_agg.row(k);
      }
    }
    if (gated) {
      Mat d_hidden = linear_backward(c.angle_hidden, d_gate, L.angle.up, params, grads);
      linear_backward_no_input(g.sbf, d_hidden, L.angle.down, grads);
      if (cache.mode == AblationMode::Full) {
        Mat d_thidden = linear_backward(c.torsion_hidden, d_gate, L.torsion.up, params, grads);
        linear_backward_no_input(g.tbf, d_thidden, L.torsion.down, grads);
      }
    }

    Mat d_down_pre = activate_backward(c.down_pre, d_down_act);
    Mat d_gated_in = linear_backward(c.gated, d_down_pre, L.down, params, grads);
    Mat d_neighbor_act = d_gated_in.cwiseProduct(c.distance_gate);
    Mat d_distance_gate = d_gated_in.cwiseProduct(c.neighbor_act);
    {
      Mat d_hidden = linear_backward(c.distance_hidden, d_distance_gate, L.distance.up, params, grads);
      linear_backward_no_input(g.rbf, d_hidden, L.distance.down, grads);
    }
    Mat d_neighbor_pre = activate_backward(c.neighbor_pre, d_neighbor_act);
    d_in += linear_backward(c.input, d_neighbor_pre, L.neighbor_transform, params, grads);
    d_e = std::move(d_in);
  }

  // Embedding block
  const auto& EL = layout.embedding;
  const auto& ec = cache.embedding;
  Mat d_pre = activate_backward(ec.pre, d_e);
  Mat d_concat = linear_backward(ec.concat, d_pre, EL.merge, params, grads);
  Mat& d_table = grads[EL.atom_table];
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    d_table.row(g.atomic_numbers[static_cast<std::size_t>(g.edges.senders[ku])]) += d_concat.row(k).segment(0, E);
    d_table.row(g.atomic_numbers[static_cast<std::size_t>(g.edges.receivers[ku])]) += d_concat.row(k).segment(E, E);
  }
  Mat d_rbf_embed = d_concat.middleCols(2 * E, E);
  Mat d_hidden = linear_backward(ec.rbf_hidden, d_rbf_embed, EL.distance.up, params, grads);
  linear_backward_no_input(g.rbf, d_hidden, EL.distance.down, grads);
}

void backward(const ForwardCache& cache, double upstream, ModelParams& params) {
  backward(cache, upstream, params, params.grads());
}

FilterTable export_filters(const ModelParams& params, const FilterGrid& grid) {
  const auto& cfg = params.config();
  if (grid.distances.empty() || grid.thetas.empty() || grid.phis.empty()) {
    throw std::invalid_argument("export_filters: empty grid");
  }
  if (grid.block < 0 || grid.block >= cfg.num_interaction_blocks) {
    throw std::out_of_range("export_filters: interaction block out of range");
  }
  FilterTable table;
  table.channels = grid.channels;
  if (table.channels.empty()) {
    for (int c = 0; c < cfg.output_embed_size; ++c) table.channels.push_back(c);
  }
  for (int c : table.channels) {
    if (c < 0 || c >= cfg.output_embed_size) throw std::out_of_range("export_filters: channel out of range");
  }

  const BasisTables tables(cfg.cutoff_c, cfg.n_srbf, cfg.n_shbf);
  const auto& lb2 = params.layout().interactions[static_cast<std::size_t>(grid.block)].torsion;
  const Mat& down = params.value(lb2.down.weight);
  const Mat& up = params.value(lb2.up.weight);

  const std::size_t npts = grid.distances.size() * grid.thetas.size() * grid.phis.size();
  table.values.resize(static_cast<Eigen::Index>(npts), static_cast<Eigen::Index>(table.channels.size()));
  Eigen::VectorXd tbf(tables.tbf_size());
  Eigen::Index row = 0;
  for (double d : grid.distances) {
    for (double theta : grid.thetas) {
      for (double phi : grid.phis) {
        tbf_embed(d, theta, phi, tables, std::span<double>(tbf.data(), static_cast<std::size_t>(tbf.size())));
        const Eigen::VectorXd filt = up * (down * tbf);
        for (std::size_t c = 0; c < table.channels.size(); ++c) {
          table.values(row, static_cast<Eigen::Index>(c)) = filt(table.channels[c]);
        }
        table.points.push_back({d, theta, phi});
        ++row;
      }
    }
  }
  return table;
}

std::string filters_to_csv(const FilterTable& table) {
  std::string out = "d,theta,phi";
  for (int c : table.channels) out += ",c" + std::to_string(c);
  out += '\n';
  for (std::size_t r = 0; r < table.points.size(); ++r) {
    out += format_double17(table.points[r][0]) + "," + format_double17(table.points[r][1]) + "," +
           format_double17(table.points[r][2]);
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      out += "," + format_double17(table.values(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace sphmp
