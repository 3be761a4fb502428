#include "config.hpp"

#include "repdyn/errors.hpp"

#include <fstream>
#include <set>

namespace repdyn::cli {

namespace {

using nlohmann::json;

void ensure_object(const json& value, const std::string& where) {
  if (!value.is_object()) {
    throw parse_error("'" + where + "' must be an object");
  }
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw parse_error("unknown key '" + (where.empty() ? item.key() : where + "." + item.key()) +
                        "'");
    }
  }
}

std::string key_path(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

double get_real(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw parse_error("'" + key_path(where, key) + "' must be a number");
  }
  return obj[key].get<double>();
}

long long get_integer(const json& obj, const std::string& where, const char* key,
                      long long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer() && !obj[key].is_number_unsigned()) {
    throw parse_error("'" + key_path(where, key) + "' must be an integer");
  }
  return obj[key].get<long long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    throw parse_error("'" + key_path(where, key) + "' must be a boolean");
  }
  return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw parse_error("'" + key_path(where, key) + "' must be a string");
  }
  return obj[key].get<std::string>();
}

std::vector<int> get_int_list(const json& obj, const std::string& where, const char* key,
                              std::vector<int> fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array()) {
    throw parse_error("'" + key_path(where, key) + "' must be a list of integers");
  }
  std::vector<int> out;
  for (const json& item : obj[key]) {
    if (!item.is_number_integer() && !item.is_number_unsigned()) {
      throw parse_error("'" + key_path(where, key) + "' must be a list of integers");
    }
    out.push_back(item.get<int>());
  }
  return out;
}

std::vector<double> get_real_list(const json& obj, const std::string& where, const char* key,
                                  std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array()) {
    throw parse_error("'" + key_path(where, key) + "' must be a list of numbers");
  }
  std::vector<double> out;
  for (const json& item : obj[key]) {
    if (!item.is_number()) {
      throw parse_error("'" + key_path(where, key) + "' must be a list of numbers");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

void require(bool condition, const std::string& where, const char* key, const char* message) {
  if (!condition) {
    throw parse_error("'" + key_path(where, key) + "' " + message);
  }
}

BlobConfig parse_blobs(const json& obj, const std::string& where, std::uint64_t default_seed,
                       int default_features, double default_std) {
  ensure_object(obj, where);
  reject_unknown_keys(obj, where,
                      {"n_samples", "n_features", "n_centers", "cluster_std", "center_min",
                       "center_max", "seed"});
  BlobConfig cfg;
  cfg.n_samples = static_cast<int>(get_integer(obj, where, "n_samples", 1000));
  cfg.n_features = static_cast<int>(get_integer(obj, where, "n_features", default_features));
  cfg.n_centers = static_cast<int>(get_integer(obj, where, "n_centers", 5));
  cfg.cluster_std = get_real(obj, where, "cluster_std", default_std);
  cfg.center_min = get_real(obj, where, "center_min", -10.0);
  cfg.center_max = get_real(obj, where, "center_max", 10.0);
  cfg.seed = obj.contains("seed")
                 ? static_cast<std::uint64_t>(get_integer(obj, where, "seed", 0))
                 : default_seed;
  require(cfg.n_centers >= 1, where, "n_centers", "must be at least 1");
  require(cfg.n_samples >= cfg.n_centers, where, "n_samples", "must be at least n_centers");
  require(cfg.n_features >= 1, where, "n_features", "must be at least 1");
  require(cfg.cluster_std >= 0.0, where, "cluster_std", "must be nonnegative");
  require(cfg.center_min < cfg.center_max, where, "center_min", "must be below center_max");
  return cfg;
}

json blobs_to_json(const BlobConfig& cfg) {
  return json{{"n_samples", cfg.n_samples}, {"n_features", cfg.n_features},
              {"n_centers", cfg.n_centers}, {"cluster_std", cfg.cluster_std},
              {"center_min", cfg.center_min}, {"center_max", cfg.center_max},
              {"seed", cfg.seed}};
}

SweepParams parse_sweep(const json& source, std::uint64_t seed, bool features_flavor) {
  SweepParams params;
  params.blobs = parse_blobs(source.contains("blobs") ? source["blobs"] : json::object(), "blobs",
                             seed, 25, 1.0);
  params.pca_k = static_cast<int>(get_integer(source, "", "pca_k", 10));
  params.repeats = static_cast<int>(get_integer(source, "", "repeats", 100));
  require(params.pca_k >= 1, "", "pca_k", "must be at least 1");
  require(params.repeats >= 1, "", "repeats", "must be at least 1");
  require(params.blobs.n_samples >= 2, "blobs", "n_samples", "must be at least 2");

  if (features_flavor) {
    params.feature_counts =
        get_int_list(source, "", "feature_counts", {15, 20, 30, 40, 50});
    require(!params.feature_counts.empty(), "", "feature_counts", "must not be empty");
    for (int count : params.feature_counts) {
      require(count >= params.pca_k + 1, "", "feature_counts",
              "entries must be at least pca_k + 1");
    }
  } else {
    params.cluster_stds =
        get_real_list(source, "", "cluster_stds", {0.5, 1.0, 2.0, 4.0, 8.0});
    require(!params.cluster_stds.empty(), "", "cluster_stds", "must not be empty");
    for (double value : params.cluster_stds) {
      require(value > 0.0, "", "cluster_stds", "entries must be positive");
    }
    require(params.blobs.n_features >= params.pca_k + 1, "blobs", "n_features",
            "must be at least pca_k + 1");
  }
  return params;
}

TrainToyParams parse_train(const json& source, std::uint64_t seed) {
  TrainToyParams params;
  TrainConfig& train = params.train;
  train.seed = seed;

  const bool has_blobs = source.contains("blobs");
  const bool has_csv = source.contains("data_csv");
  if (has_blobs && has_csv) {
    throw parse_error("'blobs' and 'data_csv' are mutually exclusive");
  }
  if (has_csv) {
    params.data_csv = get_string(source, "", "data_csv", "");
    require(!params.data_csv->empty(), "", "data_csv", "must be a nonempty path");
  } else {
    // Defaults mirror the network-simulation data setup.
    train.blob_data = parse_blobs(has_blobs ? source["blobs"] : json::object(), "blobs", seed, 25,
                                  0.01);
  }

  train.encoder_dims = get_int_list(source, "", "encoder_dims", {25, 20, 20, 20, 20, 20});
  train.projector_dims = get_int_list(source, "", "projector_dims", {20, 5, 5});
  require(train.encoder_dims.size() >= 2, "", "encoder_dims", "needs at least two entries");
  require(train.projector_dims.size() >= 2, "", "projector_dims", "needs at least two entries");
  for (int d : train.encoder_dims) require(d >= 1, "", "encoder_dims", "entries must be positive");
  for (int d : train.projector_dims) {
    require(d >= 1, "", "projector_dims", "entries must be positive");
  }
  require(train.projector_dims.front() == train.encoder_dims.back(), "", "projector_dims",
          "must start at the encoder output dimension");
  if (train.blob_data.has_value()) {
    require(train.encoder_dims.front() == train.blob_data->n_features, "", "encoder_dims",
            "must start at blobs.n_features");
  }

  if (source.contains("loss")) {
    const json& loss = source["loss"];
    ensure_object(loss, "loss");
    reject_unknown_keys(loss, "loss", {"tau", "lambda_sim", "mu_var", "nu_cov", "gamma"});
    train.loss.tau = get_real(loss, "loss", "tau", train.loss.tau);
    train.loss.lambda_sim = get_real(loss, "loss", "lambda_sim", train.loss.lambda_sim);
    train.loss.mu_var = get_real(loss, "loss", "mu_var", train.loss.mu_var);
    train.loss.nu_cov = get_real(loss, "loss", "nu_cov", train.loss.nu_cov);
    train.loss.gamma = get_real(loss, "loss", "gamma", train.loss.gamma);
  }
  require(train.loss.tau > 0.0, "loss", "tau", "must be positive");
  require(train.loss.gamma > 0.0, "loss", "gamma", "must be positive");

  if (source.contains("alpha")) {
    const json& alpha = source["alpha"];
    ensure_object(alpha, "alpha");
    reject_unknown_keys(alpha, "alpha",
                        {"mode", "value", "every_epochs", "probe_batches", "probe_batch_size"});
    const std::string mode = get_string(alpha, "alpha", "mode", "fixed");
    if (mode == "fixed") {
      train.alpha_mode = AlphaMode::fixed;
    } else if (mode == "adaptive") {
      train.alpha_mode = AlphaMode::adaptive;
    } else {
      throw parse_error("'alpha.mode' must be 'fixed' or 'adaptive'");
    }
    train.fixed_alpha = get_real(alpha, "alpha", "value", 1.0);
    train.schedule.every_epochs =
        static_cast<int>(get_integer(alpha, "alpha", "every_epochs", 50));
    train.schedule.probe_batches =
        static_cast<int>(get_integer(alpha, "alpha", "probe_batches", 10));
    train.schedule.probe_batch_size =
        static_cast<int>(get_integer(alpha, "alpha", "probe_batch_size", 256));
  }
  require(train.fixed_alpha >= 0.0 && train.fixed_alpha <= 1.0, "alpha", "value",
          "must lie in [0, 1]");
  require(train.schedule.every_epochs >= 1, "alpha", "every_epochs", "must be at least 1");
  require(train.schedule.probe_batches >= 1, "alpha", "probe_batches", "must be at least 1");
  require(train.schedule.probe_batch_size >= 2, "alpha", "probe_batch_size",
          "must be at least 2");

  if (source.contains("adam")) {
    const json& adam = source["adam"];
    ensure_object(adam, "adam");
    reject_unknown_keys(adam, "adam", {"lr", "beta1", "beta2", "eps"});
    train.adam.lr = get_real(adam, "adam", "lr", train.adam.lr);
    train.adam.beta1 = get_real(adam, "adam", "beta1", train.adam.beta1);
    train.adam.beta2 = get_real(adam, "adam", "beta2", train.adam.beta2);
    train.adam.eps = get_real(adam, "adam", "eps", train.adam.eps);
  }
  require(train.adam.lr >= 0.0, "adam", "lr", "must be nonnegative");
  require(train.adam.beta1 >= 0.0 && train.adam.beta1 < 1.0, "adam", "beta1",
          "must lie in [0, 1)");
  require(train.adam.beta2 >= 0.0 && train.adam.beta2 < 1.0, "adam", "beta2",
          "must lie in [0, 1)");
  require(train.adam.eps > 0.0, "adam", "eps", "must be positive");

  train.epochs = static_cast<int>(get_integer(source, "", "epochs", 1000));
  train.batch_size = static_cast<int>(get_integer(source, "", "batch_size", 0));
  train.augment_sigma = get_real(source, "", "augment_sigma", 0.5);
  train.log_every = static_cast<int>(get_integer(source, "", "log_every", 10));
  require(train.epochs >= 0, "", "epochs", "must be nonnegative");
  require(train.batch_size == 0 || train.batch_size >= 2, "", "batch_size",
          "must be 0 (full batch) or at least 2");
  require(train.augment_sigma >= 0.0, "", "augment_sigma", "must be nonnegative");
  require(train.log_every >= 1, "", "log_every", "must be at least 1");

  params.save_model = get_bool(source, "", "save_model", true);
  params.export_labels = get_bool(source, "", "export_labels", false);
  if (source.contains("resume")) {
    params.resume = get_string(source, "", "resume", "");
    require(!params.resume->empty(), "", "resume", "must be a nonempty path");
  }
  return params;
}

MetricsParams parse_metrics(const json& source) {
  MetricsParams params;
  params.input = get_string(source, "", "input", "");
  require(!params.input.empty(), "", "input", "is required");
  if (source.contains("input2")) {
    params.input2 = get_string(source, "", "input2", "");
    require(!params.input2->empty(), "", "input2", "must be a nonempty path");
  }
  params.metrics.clear();
  const json& list = source.contains("metrics") ? source["metrics"] : json::array({"er"});
  if (!list.is_array() || list.empty()) {
    throw parse_error("'metrics' must be a nonempty list");
  }
  const std::set<std::string> known = {"er", "vne", "renyi", "mi", "cev", "count", "uniformity"};
  for (const json& item : list) {
    if (!item.is_string() || !known.contains(item.get<std::string>())) {
      throw parse_error("'metrics' entries must be one of er,vne,renyi,mi,cev,count,uniformity");
    }
    params.metrics.push_back(item.get<std::string>());
  }
  const std::string mode = get_string(source, "", "spectrum_mode", "covariance");
  if (mode == "covariance") {
    params.spectrum_mode = SpectrumMode::covariance;
  } else if (mode == "singular") {
    params.spectrum_mode = SpectrumMode::singular;
  } else {
    throw parse_error("'spectrum_mode' must be 'covariance' or 'singular'");
  }
  params.alpha = get_real(source, "", "alpha", 2.0);
  params.cev_p = get_real(source, "", "cev_p", 0.1);
  params.tau = get_real(source, "", "tau", 0.01);
  params.center = get_bool(source, "", "center", false);
  require(params.alpha > 0.0 && params.alpha != 1.0, "", "alpha",
          "must be positive and not equal to 1");
  require(params.cev_p > 0.0 && params.cev_p <= 1.0, "", "cev_p", "must lie in (0, 1]");
  require(params.tau > 0.0, "", "tau", "must be positive");
  for (const std::string& metric : params.metrics) {
    if (metric == "mi" && !params.input2.has_value()) {
      throw parse_error("'input2' is required when 'metrics' includes mi");
    }
  }
  return params;
}

}  // namespace

std::string command_name(Command command) {
  switch (command) {
    case Command::sweep_features: return "sweep-features";
    case Command::sweep_variance: return "sweep-variance";
    case Command::train_toy: return "train-toy";
    case Command::metrics: return "metrics";
  }
  return "unknown";
}

ExperimentConfig parse_config(const json& source) {
  ensure_object(source, "config");

  static const std::set<std::string> common = {"command", "seed", "out"};
  static const std::set<std::string> sweep_f_keys = {"blobs", "feature_counts", "pca_k",
                                                     "repeats"};
  static const std::set<std::string> sweep_v_keys = {"blobs", "cluster_stds", "pca_k", "repeats"};
  static const std::set<std::string> train_keys = {
      "blobs",      "data_csv",   "encoder_dims", "projector_dims", "loss",
      "alpha",      "adam",       "epochs",       "batch_size",     "augment_sigma",
      "log_every",  "save_model", "resume",       "export_labels"};
  static const std::set<std::string> metrics_keys = {
      "input", "input2", "metrics", "spectrum_mode", "alpha", "cev_p", "tau", "center"};

  const std::string command = get_string(source, "", "command", "");
  ExperimentConfig config;
  if (command == "sweep-features") {
    config.command = Command::sweep_features;
  } else if (command == "sweep-variance") {
    config.command = Command::sweep_variance;
  } else if (command == "train-toy") {
    config.command = Command::train_toy;
  } else if (command == "metrics") {
    config.command = Command::metrics;
  } else {
    throw parse_error(
        "'command' must be one of sweep-features, sweep-variance, train-toy, metrics");
  }

  const long long seed = get_integer(source, "", "seed", 0);
  require(seed >= 0, "", "seed", "must be nonnegative");
  config.seed = static_cast<std::uint64_t>(seed);

  config.out_dir = get_string(source, "", "out", "");
  require(!config.out_dir.empty(), "", "out", "is required");

  std::set<std::string> allowed = common;
  switch (config.command) {
    case Command::sweep_features: allowed.insert(sweep_f_keys.begin(), sweep_f_keys.end()); break;
    case Command::sweep_variance: allowed.insert(sweep_v_keys.begin(), sweep_v_keys.end()); break;
    case Command::train_toy: allowed.insert(train_keys.begin(), train_keys.end()); break;
    case Command::metrics: allowed.insert(metrics_keys.begin(), metrics_keys.end()); break;
  }
  reject_unknown_keys(source, "", allowed);

  switch (config.command) {
    case Command::sweep_features:
      config.sweep = parse_sweep(source, config.seed, /*features_flavor=*/true);
      break;
    case Command::sweep_variance:
      config.sweep = parse_sweep(source, config.seed, /*features_flavor=*/false);
      break;
    case Command::train_toy:
      config.train = parse_train(source, config.seed);
      break;
    case Command::metrics:
      config.metrics = parse_metrics(source);
      break;
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open config file " + path.string());
  }
  json source;
  try {
    in >> source;
  } catch (const json::parse_error& e) {
    throw parse_error("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(source);
}

json to_json(const ExperimentConfig& config) {
  json out{{"command", command_name(config.command)},
           {"seed", config.seed},
           {"out", config.out_dir.string()}};
  switch (config.command) {
    case Command::sweep_features:
      out["blobs"] = blobs_to_json(config.sweep.blobs);
      out["feature_counts"] = config.sweep.feature_counts;
      out["pca_k"] = config.sweep.pca_k;
      out["repeats"] = config.sweep.repeats;
      break;
    case Command::sweep_variance:
      out["blobs"] = blobs_to_json(config.sweep.blobs);
      out["cluster_stds"] = config.sweep.cluster_stds;
      out["pca_k"] = config.sweep.pca_k;
      out["repeats"] = config.sweep.repeats;
      break;
    case Command::train_toy: {
      const TrainConfig& train = config.train.train;
      if (config.train.data_csv.has_value()) {
        out["data_csv"] = config.train.data_csv->string();
      } else if (train.blob_data.has_value()) {
        out["blobs"] = blobs_to_json(*train.blob_data);
      }
      out["encoder_dims"] = train.encoder_dims;
      out["projector_dims"] = train.projector_dims;
      out["loss"] = json{{"tau", train.loss.tau},
                         {"lambda_sim", train.loss.lambda_sim},
                         {"mu_var", train.loss.mu_var},
                         {"nu_cov", train.loss.nu_cov},
                         {"gamma", train.loss.gamma}};
      out["alpha"] = json{{"mode", train.alpha_mode == AlphaMode::fixed ? "fixed" : "adaptive"},
                          {"value", train.fixed_alpha},
                          {"every_epochs", train.schedule.every_epochs},
                          {"probe_batches", train.schedule.probe_batches},
                          {"probe_batch_size", train.schedule.probe_batch_size}};
      out["adam"] = json{{"lr", train.adam.lr},
                         {"beta1", train.adam.beta1},
                         {"beta2", train.adam.beta2},
                         {"eps", train.adam.eps}};
      out["epochs"] = train.epochs;
      out["batch_size"] = train.batch_size;
      out["augment_sigma"] = train.augment_sigma;
      out["log_every"] = train.log_every;
      out["save_model"] = config.train.save_model;
      out["export_labels"] = config.train.export_labels;
      if (config.train.resume.has_value()) out["resume"] = config.train.resume->string();
      break;
    }
    case Command::metrics:
      out["input"] = config.metrics.input.string();
      if (config.metrics.input2.has_value()) out["input2"] = config.metrics.input2->string();
      out["metrics"] = config.metrics.metrics;
      out["spectrum_mode"] =
          config.metrics.spectrum_mode == SpectrumMode::covariance ? "covariance" : "singular";
      out["alpha"] = config.metrics.alpha;
      out["cev_p"] = config.metrics.cev_p;
      out["tau"] = config.metrics.tau;
      out["center"] = config.metrics.center;
      break;
  }
  return out;
}

}  // namespace repdyn::cli
