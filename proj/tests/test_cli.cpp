// SPDX-License-Identifier: Apache-2.0
#include "sphmp/checkpoint.hpp"
#include "sphmp/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sphmp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sphmp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kTinyConfig =
    "cutoff_c: 3\nn_srbf: 3\nn_shbf: 3\nnum_interaction_blocks: 1\nembed_size: 8\noutput_embed_size: 4\n"
    "lb2_intermediate_distance: 4\nlb2_intermediate_angle: 4\nlb2_intermediate_torsion: 4\nnum_residual_blocks: 1\n"
    "batch_size: 4\nmax_epochs: 3\ninit_lr: 0.01\nvalid_fraction: 0.25\n";

std::string dataset_xyz() {
  std::string s;
  for (int i = 0; i < 12; ++i) {
    const double a = 0.9 + 0.02 * i;
    s += "3\nid=w" + std::to_string(i) + " target=" + std::to_string(0.1 * i) + "\nO 0 0 0\nH " + std::to_string(a) +
         " 0 0\nH -0.3 " + std::to_string(a) + " 0.1\n";
  }
  return s;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help on every subcommand") {
    for (const char* cmd : {"featurize", "train", "eval", "ablate", "basis-dump", "export-filters"}) {
      const auto r = run({cmd, "--help"});
      CHECK(r.code == 0);
      CHECK(r.out.find("--seed") != std::string::npos);
      CHECK(r.out.find("--threads") != std::string::npos);
    }
    CHECK(run({"--help"}).code == 0);
    const std::string exe = SPHMP_CLI_PATH;
    CHECK(std::system((exe + " train --help > /dev/null").c_str()) == 0);
  }

  TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"basis-dump", "--bogus", "1"}).code == 1);
    CHECK(run({"basis-dump", "--n-shbf", "40"}).code == 1);
    const auto r = run({"featurize"});
    CHECK(r.code == 1);
    CHECK(r.err.find('\n') == r.err.size() - 1);
  }

  TEST_CASE("featurize hydrogen peroxide") {
    const auto dir = scratch("featurize");
    const double t = 100.0 * std::numbers::pi / 180.0;
    const double psi = 111.5 * std::numbers::pi / 180.0;
    std::ostringstream xyz;
    xyz.precision(17);
    xyz << "4\nid=h2o2\n"
        << "H " << 0.97 * std::cos(t) << " " << 0.97 * std::sin(t) << " 0\n"
        << "O 0 0 0\nO 1.45 0 0\n"
        << "H " << 1.45 - 0.97 * std::cos(t) << " " << 0.97 * std::sin(t) * std::cos(psi) << " "
        << 0.97 * std::sin(t) * std::sin(psi) << "\n";
    write_file(dir / "h2o2.xyz", xyz.str());
    const auto r = run({"featurize", "--input", (dir / "h2o2.xyz").string(), "--cutoff", "5.0", "--out",
                        (dir / "geom.csv").string()});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(dir / "geom.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "graph_id,k,j,d,theta,phi");
    // Edges sorted by (receiver, sender): O1 -> O2 is edge (receiver 2, sender 1) = index 7.
    std::vector<double> phis;
    int rows = 0;
    while (std::getline(lines, line)) {
      ++rows;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
      REQUIRE(cells.size() == 6);
      CHECK(cells[0] == "h2o2");
      if (cells[1] == "7") phis.push_back(std::stod(cells[5]));
    }
    CHECK(rows == 12 * 2);
    REQUIRE(phis.size() == 2);
    std::sort(phis.begin(), phis.end());
    CHECK(phis[0] == doctest::Approx(psi).epsilon(1e-12));
    CHECK(phis[1] == doctest::Approx(2 * std::numbers::pi - psi).epsilon(1e-12));
  }

  TEST_CASE("train, eval and export-filters") {
    const auto dir = scratch("train");
    write_file(dir / "data.xyz", dataset_xyz());
    write_file(dir / "tiny.cfg", kTinyConfig);
    const auto args = [&](const std::string& tag, const std::string& threads) {
      return std::vector<std::string>{"train", "--data", (dir / "data.xyz").string(), "--config",
                                      (dir / "tiny.cfg").string(), "--seed", "3", "--threads", threads,
                                      "--out", (dir / ("m" + tag + ".bin")).string(), "--log",
                                      (dir / ("log" + tag + ".csv")).string()};
    };
    REQUIRE(run(args("a", "1")).code == 0);
    REQUIRE(run(args("b", "4")).code == 0);
    CHECK(slurp(dir / "loga.csv") == slurp(dir / "logb.csv"));
    CHECK(slurp(dir / "ma.bin") == slurp(dir / "mb.bin"));
    CHECK(slurp(dir / "loga.csv").starts_with("epoch,lr,train_mae,valid_mae\n"));

    const auto ev = run({"eval", "--model", (dir / "ma.bin").string(), "--data", (dir / "data.xyz").string()});
    REQUIRE(ev.code == 0);
    CHECK(ev.out.find("mae: ") != std::string::npos);
    CHECK(ev.out.find("ewt: ") != std::string::npos);
    CHECK(ev.out.find("n_samples: 12") != std::string::npos);

    write_file(dir / "other.cfg", "n_shbf: 4\n");
    const auto mismatch = run({"eval", "--model", (dir / "ma.bin").string(), "--data", (dir / "data.xyz").string(),
                               "--config", (dir / "other.cfg").string()});
    CHECK(mismatch.code == 2);

    const auto ef = run({"export-filters", "--model", (dir / "ma.bin").string(), "--phi", "0,1.5708,3.14159,4.71239",
                         "--d", "1.0", "--theta", "1.0"});
    REQUIRE(ef.code == 0);
    CHECK(std::count(ef.out.begin(), ef.out.end(), '\n') == 5);
    CHECK(ef.out.starts_with("d,theta,phi,c0,c1,c2,c3\n"));
  }

  TEST_CASE("data errors exit with 2") {
    const auto dir = scratch("dataerr");
    write_file(dir / "bad.xyz", "2\n\nH 0 0 0\nQq 1 0 0\n");
    const auto r = run({"featurize", "--input", (dir / "bad.xyz").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 4") != std::string::npos);
    write_file(dir / "bad.cfg", "n_srbf: 0\n");
    write_file(dir / "ok.xyz", "1\ntarget=1\nH 0 0 0\n");
    CHECK(run({"train", "--data", (dir / "ok.xyz").string(), "--config", (dir / "bad.cfg").string(), "--out",
               (dir / "m.bin").string()})
              .code == 2);
  }

  TEST_CASE("numerical failure exits with 3") {
    const auto dir = scratch("numerr");
    write_file(dir / "data.xyz", dataset_xyz());
    write_file(dir / "wild.cfg", std::string(kTinyConfig) + "init_lr: 1e200\nwarmup_epochs: 0\nmax_epochs: 30\n");
    const auto r = run({"train", "--data", (dir / "data.xyz").string(), "--config", (dir / "wild.cfg").string(),
                        "--out", (dir / "m.bin").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("step") != std::string::npos);
  }

  TEST_CASE("outputs are byte identical across runs") {
    const auto a = run({"basis-dump", "--samples", "5", "--seed", "4"});
    const auto b = run({"basis-dump", "--samples", "5", "--seed", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != run({"basis-dump", "--samples", "5", "--seed", "5"}).out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 6);
    const auto f1 = run({"export-filters", "--seed", "2", "--d-samples", "2", "--theta-samples", "2"});
    const auto f2 = run({"export-filters", "--seed", "2", "--d-samples", "2", "--theta-samples", "2"});
    REQUIRE(f1.code == 0);
    CHECK(f1.out == f2.out);
    CHECK(std::count(f1.out.begin(), f1.out.end(), '\n') == 1 + 2 * 2 * 4);
  }

  TEST_CASE("ablate short run") {
    const auto dir = scratch("ablate");
    write_file(dir / "abl.cfg", std::string(kTinyConfig) + "cutoff_c: 2.0\nvalid_fraction: 0\n");
    const auto r = run({"ablate", "--task", "lengths", "--epochs", "1", "--seeds", "1", "--n-train", "64", "--n-test",
                        "16", "--config", (dir / "abl.cfg").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.starts_with("task,seed,FULL,NO_TORSION,NO_ANGLE_TORSION\n"));
    CHECK(r.out.find("lengths,median,") != std::string::npos);
    CHECK(run({"ablate", "--task", "colour"}).code == 1);
  }
}
