#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radsnn/network.hpp"
#include "radsnn/synth.hpp"

namespace radsnn {

// Invalid or missing configuration; the message names the offending field.
// The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct DatasetConfig {
  // Directories of event files; when train_dir is empty the synthetic task is
  // generated in memory instead.
  std::string train_dir;
  std::string test_dir;
  std::string format = "canonical";  // canonical | csv
  bool split_polarity = false;
};

struct SynthConfig {
  SynthParams params;                // samples_per_class applies to training
  int test_samples_per_class = 50;
  // Data seeds are independent of the trial seed so every trial sees the same
  // task and only the training randomness varies.
  std::uint64_t train_seed = 101;
  std::uint64_t test_seed = 202;
};

struct GradcheckConfig {
  std::vector<std::size_t> layer_sizes = {4, 8, 3};
  std::size_t steps = 32;
  double spike_rate = 0.15;  // input density of the random sample
  // Milder than the training default on purpose: it keeps the smoothed
  // sigmoids out of saturation, where gradients vanish below the resolution
  // of central differences.
  double init_rate = 0.5;
  std::vector<double> h_sweep = {1e-3, 1e-4, 1e-5};
  double tolerance = 1e-4;
  std::size_t sign_configs = 200;
  std::uint64_t seed = 7;
};

struct RunConfig {
  std::string profile = "synth";
  DatasetConfig dataset;
  SynthConfig synth;
  std::vector<std::size_t> hidden_sizes = {32};
  // layer_sizes stays empty here; it is assembled per run from the dataset
  // geometry (input channels, class count) around hidden_sizes.
  NetworkSpec network;
  TrainConfig train;
  GradcheckConfig gradcheck;
  std::vector<double> ablate_theta_d;
  std::string out_dir = "runs/latest";
  std::size_t trials = 1;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError naming the field
};

// Table-derived hyperparameter presets: nmnist (tau 1/1, cap 64), dvsgesture
// (5/5, 64), ntidigits (5/5, 128), synth (5/5, 64 plus generation defaults;
// kernels sized to the generator's jitter). theta_u = 10 and Ts = 1 ms
// everywhere.
void apply_profile(RunConfig& config, const std::string& name);

RunConfig default_config();

// Defaults, then the file's profile, then the file's fields. Unknown keys are
// rejected by name.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// "inf"/"+inf" or a non-negative number.
double parse_theta_d(const std::string& token);

// Echo of every effective field as a JSON document (theta_d +inf becomes the
// string "inf"); feeding it back reproduces the run.
std::string effective_config_json(const RunConfig& config);

}  // namespace radsnn
