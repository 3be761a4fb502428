/**
 * repdyn: representation-dynamics experiments from the command line.
 *
 * Subcommands drive the Gaussian simulation sweeps, the toy two-view
 * training loop, and offline spectrum metrics over CSV feature matrices.
 * Every run writes its artifacts plus a manifest (resolved config, seed,
 * wall time, checksums) into the chosen output directory.
 */

#include "config.hpp"
#include "runner.hpp"

#include "repdyn/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;  // -1: not given on the command line
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config file");
  cmd->add_option("--seed", flags.seed, "base RNG seed (overrides the config file)");
  cmd->add_option("--out", flags.out_dir, "output directory (overrides the config file)");
}

json load_base_config(const CommonFlags& flags, const std::string& command) {
  json source = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) {
      throw repdyn::parse_error("cannot open config file " + flags.config_path);
    }
    try {
      in >> source;
    } catch (const json::parse_error& e) {
      throw repdyn::parse_error("config file " + flags.config_path +
                                " is not valid JSON: " + e.what());
    }
  }
  if (!source.is_object()) {
    throw repdyn::parse_error("config file must hold a JSON object");
  }
  if (source.contains("command") && source["command"] != command) {
    throw repdyn::parse_error("config file is for command '" +
                              source["command"].get<std::string>() + "', not '" + command + "'");
  }
  source["command"] = command;
  if (flags.seed >= 0) source["seed"] = flags.seed;
  if (!flags.out_dir.empty()) source["out"] = flags.out_dir;
  return source;
}

int run(const json& source) {
  const repdyn::cli::ExperimentConfig config = repdyn::cli::parse_config(source);
  const repdyn::cli::Manifest manifest = repdyn::cli::run_experiment(config);
  std::cout << repdyn::cli::command_name(config.command) << ": wrote "
            << manifest.artifacts.size() << " artifact(s) to " << config.out_dir.string() << '\n';
  for (const auto& artifact : manifest.artifacts) {
    std::cout << "  " << artifact.name << "  " << artifact.bytes << " bytes  fnv1a64:"
              << artifact.checksum << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"representation-dynamics simulation lab"};
  app.require_subcommand(1);

  CommonFlags sweep_f_flags;
  CLI::App* sweep_f = app.add_subcommand(
      "sweep-features", "closed-form I(R;Z) as the blob feature count varies");
  add_common_flags(sweep_f, sweep_f_flags);

  CommonFlags sweep_v_flags;
  CLI::App* sweep_v = app.add_subcommand(
      "sweep-variance", "closed-form I(R;Z) as the blob cluster noise varies");
  add_common_flags(sweep_v, sweep_v_flags);

  CommonFlags train_flags;
  CLI::App* train_toy =
      app.add_subcommand("train-toy", "two-view MLP training with trajectory logging");
  add_common_flags(train_toy, train_flags);

  CommonFlags metrics_flags;
  std::vector<std::string> metric_inputs;
  std::string metric_list;
  std::string spectrum_mode;
  double metric_alpha = -1.0;
  double metric_cev_p = -1.0;
  double metric_tau = -1.0;
  bool metric_center = false;
  CLI::App* metrics =
      app.add_subcommand("metrics", "spectrum metrics over a CSV feature matrix");
  add_common_flags(metrics, metrics_flags);
  metrics->add_option("--input", metric_inputs,
                      "input CSV (give twice for the two-matrix mi metric)")
      ->expected(1, 2);
  metrics->add_option("--metrics", metric_list,
                      "comma list from er,vne,renyi,mi,cev,count,uniformity");
  metrics->add_option("--spectrum-mode", spectrum_mode, "covariance or singular");
  metrics->add_option("--alpha", metric_alpha, "Renyi order for renyi/mi");
  metrics->add_option("--cev-p", metric_cev_p, "top fraction for cev");
  metrics->add_option("--tau", metric_tau, "threshold for count");
  metrics->add_flag("--center", metric_center, "mean-center features before Gram metrics");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_f->parsed()) return run(load_base_config(sweep_f_flags, "sweep-features"));
    if (sweep_v->parsed()) return run(load_base_config(sweep_v_flags, "sweep-variance"));
    if (train_toy->parsed()) return run(load_base_config(train_flags, "train-toy"));

    json source = load_base_config(metrics_flags, "metrics");
    if (!metric_inputs.empty()) source["input"] = metric_inputs[0];
    if (metric_inputs.size() > 1) source["input2"] = metric_inputs[1];
    if (!metric_list.empty()) {
      json list = json::array();
      std::string::size_type start = 0;
      while (start <= metric_list.size()) {
        const auto comma = metric_list.find(',', start);
        const std::string item = metric_list.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) list.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      source["metrics"] = list;
    }
    if (!spectrum_mode.empty()) source["spectrum_mode"] = spectrum_mode;
    if (metric_alpha > 0.0) source["alpha"] = metric_alpha;
    if (metric_cev_p > 0.0) source["cev_p"] = metric_cev_p;
    if (metric_tau > 0.0) source["tau"] = metric_tau;
    if (metric_center) source["center"] = true;
    return run(source);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
