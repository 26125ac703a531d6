// SPDX-License-Identifier: Apache-2.0
#include "sphmp/cli.hpp"

#include "sphmp/ablation.hpp"
#include "sphmp/checkpoint.hpp"
#include "sphmp/error.hpp"
#include "sphmp/metrics.hpp"
#include "sphmp/train.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace sphmp {
namespace {

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string config;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", c.threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
}

void add_config(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "RunConfig file of `key: value` lines")->check(CLI::ExistingFile);
}

RunConfig session_config(const Common& c, const CLI::App* cmd) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (cmd->count("--seed") > 0) cfg.seed = c.seed;
  return cfg;
}

std::vector<Graph3D> load_graphs(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.extension() == ".xyz") return read_xyz_file(p);
  return load_dataset(p);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  if (!f) throw DataError("cannot write " + path);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

std::string featurize_csv(const std::vector<Graph3D>& graphs, double cutoff) {
  std::string out = "graph_id,k,j,d,theta,phi\n";
  for (const auto& g : graphs) {
    const auto edges = build_radius_graph(g, cutoff);
    const auto geo = compute_two_hop_geometry(g, edges);
    for (std::size_t p = 0; p < geo.pairs.size(); ++p) {
      const auto j = geo.pairs.edge_j[p];
      out += g.id + "," + std::to_string(geo.pairs.edge_k[p]) + "," + std::to_string(j) + "," +
             format_double17(edges.distances[j]) + "," + format_double17(geo.theta[p]) + "," +
             format_double17(geo.phi[p]) + "\n";
    }
  }
  return out;
}

std::string basis_dump_csv(double cutoff, int n_srbf, int n_shbf, int samples, std::uint64_t seed) {
  const BasisTables tables(cutoff, n_srbf, n_shbf);
  std::string out = "d,theta,phi";
  for (int n = 1; n <= n_srbf; ++n) out += ",rbf_n" + std::to_string(n);
  for (int l = 0; l < n_shbf; ++l) {
    for (int n = 1; n <= n_srbf; ++n) out += ",sbf_l" + std::to_string(l) + "_n" + std::to_string(n);
  }
  for (int l = 0; l < n_shbf; ++l) {
    for (int m = -l; m <= l; ++m) {
      for (int n = 1; n <= n_srbf; ++n) {
        out += ",tbf_l" + std::to_string(l) + "_m" + std::to_string(m) + "_n" + std::to_string(n);
      }
    }
  }
  out += '\n';
  CounterRng rng(seed, "basis-dump");
  for (int i = 0; i < samples; ++i) {
    const double d = cutoff * (1.0 - rng.uniform());  // (0, c]
    const double theta = std::numbers::pi * rng.uniform();
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    out += format_double17(d) + "," + format_double17(theta) + "," + format_double17(phi);
    for (Eigen::Index k = 0; k < tables.rbf_size(); ++k) out += "," + format_double17(rbf_embed(d, tables)(k));
    const Eigen::MatrixXd sbf = sbf_embed(d, theta, tables);
    for (Eigen::Index l = 0; l < sbf.rows(); ++l) {
      for (Eigen::Index n = 0; n < sbf.cols(); ++n) out += "," + format_double17(sbf(l, n));
    }
    const Eigen::VectorXd tbf = tbf_embed(d, theta, phi, tables);
    for (Eigen::Index k = 0; k < tbf.size(); ++k) out += "," + format_double17(tbf(k));
    out += '\n';
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical message passing on 3D molecular graphs"};
  app.name("sphmp");
  app.require_subcommand(1);

  // featurize
  Common fz_common;
  std::string fz_input, fz_out;
  double fz_cutoff = 5.0;
  auto* featurize = app.add_subcommand("featurize", "Per-pair (d, theta, phi) table of every graph in an XYZ file");
  add_common(featurize, fz_common);
  featurize->add_option("--input", fz_input, "XYZ file (one or more frames)")->required()->check(CLI::ExistingFile);
  featurize->add_option("--cutoff", fz_cutoff, "Radius-graph cutoff in angstrom")->capture_default_str();
  featurize->add_option("--out", fz_out, "Output CSV path, '-' for stdout");

  // train
  Common tr_common;
  std::string tr_data, tr_out, tr_log, tr_mode;
  std::optional<int> tr_epochs;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint plus an epoch log");
  add_common(train_cmd, tr_common);
  add_config(train_cmd, tr_common);
  train_cmd->add_option("--data", tr_data, "Manifest of {file, target} lines, or an XYZ file with target= comments")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr_out, "Checkpoint path")->required();
  train_cmd->add_option("--log", tr_log, "Epoch log CSV path, '-' for stdout");
  train_cmd->add_option("--epochs", tr_epochs, "Override max_epochs");
  train_cmd->add_option("--mode", tr_mode, "Override ablation_mode (FULL, NO_TORSION, NO_ANGLE_TORSION)");

  // eval
  Common ev_common;
  std::string ev_model, ev_data, ev_out;
  auto* eval_cmd = app.add_subcommand("eval", "Metric report (MAE, std. MAE, EwT) of a checkpoint on a dataset");
  add_common(eval_cmd, ev_common);
  add_config(eval_cmd, ev_common);
  eval_cmd->add_option("--model", ev_model, "Checkpoint path")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", ev_data, "Manifest or XYZ file with targets")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", ev_out, "Report path, '-' for stdout");

  // ablate
  Common ab_common;
  std::string ab_task = "torsion", ab_out;
  AblationSettings ab;
  auto* ablate = app.add_subcommand("ablate", "Train all three geometry modes on a synthetic chain task");
  add_common(ablate, ab_common);
  add_config(ablate, ab_common);
  ablate->add_option("--task", ab_task, "torsion, angles or lengths")
      ->check(CLI::IsMember({"torsion", "angles", "lengths"}))
      ->capture_default_str();
  ablate->add_option("--epochs", ab.epochs, "Epochs per run")->check(CLI::PositiveNumber)->capture_default_str();
  ablate->add_option("--seeds", ab.seeds, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();
  ablate->add_option("--n-train", ab.n_train, "Training chains")->check(CLI::PositiveNumber)->capture_default_str();
  ablate->add_option("--n-test", ab.n_test, "Test chains")->check(CLI::PositiveNumber)->capture_default_str();
  ablate->add_option("--out", ab_out, "Table path, '-' for stdout");

  // basis-dump
  Common bd_common;
  double bd_cutoff = 5.0;
  int bd_srbf = 6, bd_shbf = 7, bd_samples = 16;
  std::string bd_out;
  auto* basis_dump = app.add_subcommand("basis-dump", "rbf, sbf and tbf values at random (d, theta, phi) samples");
  add_common(basis_dump, bd_common);
  basis_dump->add_option("--cutoff", bd_cutoff, "Cutoff in angstrom")->capture_default_str();
  basis_dump->add_option("--n-srbf", bd_srbf, "Radial basis size")->check(CLI::Range(1, 64))->capture_default_str();
  basis_dump->add_option("--n-shbf", bd_shbf, "Spherical harmonic degrees")->check(CLI::Range(1, 17))->capture_default_str();
  basis_dump->add_option("--samples", bd_samples, "Sample count")->check(CLI::NonNegativeNumber)->capture_default_str();
  basis_dump->add_option("--out", bd_out, "Output CSV path, '-' for stdout");

  // export-filters
  Common ef_common;
  std::string ef_model, ef_out;
  std::vector<double> ef_d, ef_theta, ef_phi;
  std::vector<int> ef_channels;
  int ef_block = 0, ef_d_samples = 8, ef_theta_samples = 8;
  auto* export_cmd = app.add_subcommand("export-filters", "Torsion filter of one interaction block on a (d, theta, phi) grid");
  add_common(export_cmd, ef_common);
  add_config(export_cmd, ef_common);
  export_cmd->add_option("--model", ef_model, "Checkpoint; without it, parameters are initialized from --seed")
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--block", ef_block, "Interaction block index")->capture_default_str();
  export_cmd->add_option("--d", ef_d, "Comma-separated distances")->delimiter(',');
  export_cmd->add_option("--theta", ef_theta, "Comma-separated polar angles")->delimiter(',');
  export_cmd->add_option("--phi", ef_phi, "Comma-separated torsion angles (default 0, pi/2, pi, 3pi/2)")->delimiter(',');
  export_cmd->add_option("--d-samples", ef_d_samples, "Evenly spaced distances in (0, c] when --d is absent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  export_cmd->add_option("--theta-samples", ef_theta_samples, "Evenly spaced angles in [0, pi] when --theta is absent")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  export_cmd->add_option("--channels", ef_channels, "Comma-separated output channels (default all)")->delimiter(',');
  export_cmd->add_option("--out", ef_out, "Output CSV path, '-' for stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (featurize->parsed()) {
      write_output(fz_out, featurize_csv(read_xyz_file(fz_input), fz_cutoff), out);
    } else if (train_cmd->parsed()) {
      RunConfig cfg = session_config(tr_common, train_cmd);
      if (tr_epochs) cfg.max_epochs = *tr_epochs;
      if (!tr_mode.empty()) cfg.ablation_mode = parse_ablation_mode(tr_mode);
      validate(cfg);
      TrainOptions opts;
      opts.threads = tr_common.threads;
      const auto result = train(load_graphs(tr_data), cfg, cfg.seed, opts);
      save_checkpoint(tr_out, result.best);
      write_output(tr_log, epoch_log_csv(result.log), out);
    } else if (eval_cmd->parsed()) {
      const ModelParams params = ev_common.config.empty()
                                     ? load_checkpoint(ev_model)
                                     : load_checkpoint(ev_model, session_config(ev_common, eval_cmd));
      write_output(ev_out, to_text(evaluate(params, load_graphs(ev_data), ev_common.threads)), out);
    } else if (ablate->parsed()) {
      const RunConfig base = ab_common.config.empty() ? ablation_config() : load_config(ab_common.config);
      ab.task = parse_synthetic_task(ab_task);
      ab.base_seed = ab_common.seed;
      ab.threads = ab_common.threads;
      write_output(ab_out, to_table(run_ablation(base, ab)), out);
    } else if (basis_dump->parsed()) {
      if (!(bd_cutoff > 0.0)) throw std::invalid_argument("--cutoff must be positive");
      write_output(bd_out, basis_dump_csv(bd_cutoff, bd_srbf, bd_shbf, bd_samples, bd_common.seed), out);
    } else if (export_cmd->parsed()) {
      const RunConfig cfg = session_config(ef_common, export_cmd);
      const ModelParams params = ef_model.empty() ? init_params(cfg, cfg.seed)
                                 : ef_common.config.empty() ? load_checkpoint(ef_model)
                                                            : load_checkpoint(ef_model, cfg);
      const double c = params.config().cutoff_c;
      FilterGrid grid;
      grid.block = ef_block;
      grid.distances = ef_d.empty() ? linspace(c / ef_d_samples, c, ef_d_samples) : ef_d;
      grid.thetas = ef_theta.empty() ? linspace(0.0, std::numbers::pi, ef_theta_samples) : ef_theta;
      grid.phis = ef_phi.empty()
                      ? std::vector<double>{0.0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2}
                      : ef_phi;
      grid.channels = ef_channels;
      write_output(ef_out, filters_to_csv(export_filters(params, grid)), out);
    }
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace sphmp
