#include "config.hpp"
#include "runner.hpp"

#include "repdyn/csv.hpp"
#include "repdyn/errors.hpp"
#include "repdyn/spectrum.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace repdyn;
using namespace repdyn::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("repdyn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

json minimal_sweep(const fs::path& out) {
  return json{{"command", "sweep-features"}, {"seed", 3}, {"out", out.string()},
              {"feature_counts", {6, 8}},    {"pca_k", 3}, {"repeats", 2},
              {"blobs", {{"n_samples", 120}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("parse_config fills defaults and round-trips") {
  TempDir dir;
  const json source = minimal_sweep(dir.path);
  const ExperimentConfig config = parse_config(source);
  CHECK(config.command == Command::sweep_features);
  CHECK(config.seed == 3);
  CHECK(config.sweep.blobs.n_samples == 120);
  CHECK(config.sweep.blobs.n_centers == 5);          // default echoed
  CHECK(config.sweep.blobs.cluster_std == 1.0);      // default echoed
  CHECK(config.sweep.blobs.seed == 3);               // inherits the run seed
  CHECK(config.sweep.repeats == 2);

  const json resolved = to_json(config);
  CHECK(resolved.contains("blobs"));
  CHECK(resolved["blobs"]["n_centers"] == 5);
  const ExperimentConfig reparsed = parse_config(resolved);
  CHECK(to_json(reparsed) == resolved);

  // Default-heavy train config round-trips too.
  const json train_source = json{{"command", "train-toy"}, {"out", dir.path.string()}};
  const json train_resolved = to_json(parse_config(train_source));
  CHECK(train_resolved["epochs"] == 1000);
  CHECK(train_resolved["loss"]["tau"] == 0.1);
  CHECK(train_resolved["loss"]["lambda_sim"] == 25.0);
  CHECK(train_resolved["adam"]["lr"] == 1e-4);
  CHECK(train_resolved["blobs"]["cluster_std"] == 0.01);
  CHECK(to_json(parse_config(train_resolved)) == train_resolved);
}

TEST_CASE("parse_config rejects bad input with the offending key") {
  TempDir dir;
  json bad = minimal_sweep(dir.path);
  bad["blobs"]["cluster_std"] = -1.0;
  try {
    parse_config(bad);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("cluster_std") != std::string::npos);
  }

  json unknown = minimal_sweep(dir.path);
  unknown["blobs"]["stray"] = 1;
  try {
    parse_config(unknown);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find("stray") != std::string::npos);
  }

  json wrong_type = minimal_sweep(dir.path);
  wrong_type["pca_k"] = "three";
  CHECK_THROWS_AS(parse_config(wrong_type), parse_error);

  CHECK_THROWS_AS(parse_config(json{{"command", "fly-to-the-moon"}, {"out", "x"}}), parse_error);
  CHECK_THROWS_AS(parse_config(json{{"command", "metrics"}, {"out", "x"}}), parse_error);

  // mi requires a second input.
  CHECK_THROWS_AS(parse_config(json{{"command", "metrics"},
                                    {"out", "x"},
                                    {"input", "a.csv"},
                                    {"metrics", {"mi"}}}),
                  parse_error);
}

TEST_CASE("metrics experiment reproduces the spectrum module") {
  TempDir dir;
  // Regular tetrahedron rows: covariance is isotropic, effective rank 3.
  Eigen::MatrixXd tetra(4, 3);
  tetra << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  const fs::path input = dir.path / "tetra.csv";
  write_feature_csv(tetra, {}, input);

  const json source = json{{"command", "metrics"},
                           {"out", (dir.path / "run").string()},
                           {"input", input.string()},
                           {"metrics", {"er", "vne", "count", "uniformity"}}};
  const Manifest manifest = run_experiment(parse_config(source));
  REQUIRE(manifest.artifacts.size() == 1);
  CHECK(manifest.artifacts[0].name == "metrics.csv");

  std::ifstream in(dir.path / "run" / "metrics.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "metric,value");
  std::getline(in, line);
  CHECK(line.rfind("er,", 0) == 0);
  const double er = std::stod(line.substr(3));
  CHECK(er == doctest::Approx(3.0).epsilon(1e-9));
  const double expected =
      effective_rank(compute_spectrum(FeatureMatrix(tetra), SpectrumMode::covariance));
  CHECK(er == doctest::Approx(expected).epsilon(1e-12));

  CHECK(fs::exists(dir.path / "run" / "manifest.json"));
}

TEST_CASE("train-toy with zero epochs writes a header-only trajectory") {
  TempDir dir;
  const json source = json{{"command", "train-toy"},
                           {"out", (dir.path / "run").string()},
                           {"seed", 5},
                           {"epochs", 0},
                           {"blobs", {{"n_samples", 30}, {"n_features", 4}}},
                           {"encoder_dims", {4, 6, 3}},
                           {"projector_dims", {3, 2}},
                           {"save_model", true},
                           {"export_labels", true}};
  const Manifest manifest = run_experiment(parse_config(source));

  const std::string trajectory = slurp(dir.path / "run" / "trajectory.csv");
  CHECK(trajectory ==
        "epoch,loss_total,loss_nce,loss_vicreg,alpha,er_r,er_z,mi_rz,uniformity_r,uniformity_z\n");
  CHECK(fs::exists(dir.path / "run" / "model.ckpt"));
  CHECK(fs::exists(dir.path / "run" / "labels.csv"));
  CHECK(manifest.artifacts.size() == 3);
}

TEST_CASE("identical configs produce identical artifacts") {
  TempDir dir;
  json source = minimal_sweep(dir.path / "a");
  const Manifest first = run_experiment(parse_config(source));
  source["out"] = (dir.path / "b").string();
  const Manifest second = run_experiment(parse_config(source));

  REQUIRE(first.artifacts.size() == second.artifacts.size());
  for (std::size_t i = 0; i < first.artifacts.size(); ++i) {
    CHECK(first.artifacts[i].name == second.artifacts[i].name);
    CHECK(first.artifacts[i].checksum == second.artifacts[i].checksum);
    CHECK(slurp(dir.path / "a" / first.artifacts[i].name) ==
          slurp(dir.path / "b" / second.artifacts[i].name));
  }

  // A different seed changes the artifacts.
  source["out"] = (dir.path / "c").string();
  source["seed"] = 4;
  const Manifest third = run_experiment(parse_config(source));
  CHECK(third.artifacts[0].checksum != first.artifacts[0].checksum);
}

TEST_CASE("failed experiments leave no partial outputs") {
  TempDir dir;
  const json source = json{{"command", "metrics"},
                           {"out", (dir.path / "run").string()},
                           {"input", (dir.path / "missing.csv").string()},
                           {"metrics", {"er"}}};
  CHECK_THROWS_AS(run_experiment(parse_config(source)), invalid_input_error);
  CHECK(!fs::exists(dir.path / "run" / "metrics.csv"));
  CHECK(!fs::exists(dir.path / "run" / "manifest.json"));
}

TEST_CASE("train-toy can resume from a checkpoint") {
  TempDir dir;
  json source = json{{"command", "train-toy"},
                     {"out", (dir.path / "first").string()},
                     {"seed", 6},
                     {"epochs", 3},
                     {"log_every", 1},
                     {"blobs", {{"n_samples", 30}, {"n_features", 4}, {"cluster_std", 0.05}}},
                     {"encoder_dims", {4, 6, 3}},
                     {"projector_dims", {3, 2}}};
  run_experiment(parse_config(source));

  source["out"] = (dir.path / "second").string();
  source["resume"] = (dir.path / "first" / "model.ckpt").string();
  const Manifest resumed = run_experiment(parse_config(source));
  CHECK(fs::exists(dir.path / "second" / "trajectory.csv"));
  CHECK(resumed.config["resume"] == (dir.path / "first" / "model.ckpt").string());
}
