#include "radsnn/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace radsnn {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double theta_d_value(const ordered_json& v, const std::string& field) {
  if (v.is_string()) return parse_theta_d(v.get<std::string>());
  if (v.is_number()) {
    const double d = v.get<double>();
    if (d < 0) throw ConfigError(field, "must be non-negative");
    return d;
  }
  throw ConfigError(field, "expected a non-negative number or \"inf\"");
}

ordered_json theta_d_json(double theta_d) {
  if (std::isinf(theta_d)) return "inf";
  return theta_d;
}

template <typename T>
T expect(const ordered_json& v, const std::string& field) {
  try {
    return v.get<T>();
  } catch (const ordered_json::exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

void reject_unknown(const ordered_json& obj, const std::string& block,
                    std::initializer_list<const char*> known) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) ok = true;
    if (!ok) throw ConfigError(block.empty() ? item.key() : block + "." + item.key(),
                               "unknown field");
  }
}

void merge_dataset(DatasetConfig& c, const ordered_json& j) {
  reject_unknown(j, "dataset", {"train_dir", "test_dir", "format", "split_polarity"});
  if (j.contains("train_dir")) c.train_dir = expect<std::string>(j["train_dir"], "dataset.train_dir");
  if (j.contains("test_dir")) c.test_dir = expect<std::string>(j["test_dir"], "dataset.test_dir");
  if (j.contains("format")) c.format = expect<std::string>(j["format"], "dataset.format");
  if (j.contains("split_polarity"))
    c.split_polarity = expect<bool>(j["split_polarity"], "dataset.split_polarity");
}

void merge_synth(SynthConfig& c, const ordered_json& j) {
  reject_unknown(j, "synth",
                 {"class_count", "channel_count", "samples_per_class",
                  "test_samples_per_class", "duration_ms", "spikes_per_channel",
                  "anchor_start_ms", "anchor_gap_ms", "micro_offset_span_ms", "jitter_ms",
                  "train_seed", "test_seed"});
  SynthParams& p = c.params;
  if (j.contains("class_count")) p.class_count = expect<int>(j["class_count"], "synth.class_count");
  if (j.contains("channel_count"))
    p.channel_count = expect<int>(j["channel_count"], "synth.channel_count");
  if (j.contains("samples_per_class"))
    p.samples_per_class = expect<int>(j["samples_per_class"], "synth.samples_per_class");
  if (j.contains("test_samples_per_class"))
    c.test_samples_per_class =
        expect<int>(j["test_samples_per_class"], "synth.test_samples_per_class");
  if (j.contains("duration_ms")) p.duration_ms = expect<double>(j["duration_ms"], "synth.duration_ms");
  if (j.contains("spikes_per_channel"))
    p.spikes_per_channel = expect<int>(j["spikes_per_channel"], "synth.spikes_per_channel");
  if (j.contains("anchor_start_ms"))
    p.anchor_start_ms = expect<double>(j["anchor_start_ms"], "synth.anchor_start_ms");
  if (j.contains("anchor_gap_ms"))
    p.anchor_gap_ms = expect<double>(j["anchor_gap_ms"], "synth.anchor_gap_ms");
  if (j.contains("micro_offset_span_ms"))
    p.micro_offset_span_ms =
        expect<double>(j["micro_offset_span_ms"], "synth.micro_offset_span_ms");
  if (j.contains("jitter_ms")) p.jitter_ms = expect<double>(j["jitter_ms"], "synth.jitter_ms");
  if (j.contains("train_seed"))
    c.train_seed = expect<std::uint64_t>(j["train_seed"], "synth.train_seed");
  if (j.contains("test_seed"))
    c.test_seed = expect<std::uint64_t>(j["test_seed"], "synth.test_seed");
}

void merge_surrogate(SurrogateConfig& c, const ordered_json& j) {
  reject_unknown(j, "network.surrogate", {"kind", "scale", "sharpness"});
  if (j.contains("kind")) {
    const auto kind = expect<std::string>(j["kind"], "network.surrogate.kind");
    if (kind == "exponential") {
      c.kind = SurrogateKind::kExponential;
    } else if (kind == "fast_sigmoid") {
      c.kind = SurrogateKind::kFastSigmoid;
    } else {
      throw ConfigError("network.surrogate.kind", "expected exponential or fast_sigmoid");
    }
  }
  if (j.contains("scale")) c.scale = expect<double>(j["scale"], "network.surrogate.scale");
  if (j.contains("sharpness"))
    c.sharpness = expect<double>(j["sharpness"], "network.surrogate.sharpness");
}

void merge_network(RunConfig& cfg, const ordered_json& j) {
  reject_unknown(j, "network",
                 {"hidden_sizes", "delays_enabled", "theta_d_ms", "theta_u",
                  "sample_time_ms", "tau_s_ms", "tau_r_ms", "surrogate", "init_rate", "seed"});
  NetworkSpec& n = cfg.network;
  if (j.contains("hidden_sizes"))
    cfg.hidden_sizes = expect<std::vector<std::size_t>>(j["hidden_sizes"], "network.hidden_sizes");
  if (j.contains("delays_enabled"))
    n.delays_enabled = expect<bool>(j["delays_enabled"], "network.delays_enabled");
  if (j.contains("theta_d_ms")) n.theta_d_ms = theta_d_value(j["theta_d_ms"], "network.theta_d_ms");
  if (j.contains("theta_u")) n.theta_u = expect<double>(j["theta_u"], "network.theta_u");
  if (j.contains("sample_time_ms"))
    n.sample_time_ms = expect<double>(j["sample_time_ms"], "network.sample_time_ms");
  if (j.contains("tau_s_ms")) n.tau_s_ms = expect<double>(j["tau_s_ms"], "network.tau_s_ms");
  if (j.contains("tau_r_ms")) n.tau_r_ms = expect<double>(j["tau_r_ms"], "network.tau_r_ms");
  if (j.contains("surrogate")) merge_surrogate(n.surrogate, j["surrogate"]);
  if (j.contains("init_rate")) n.init_rate = expect<double>(j["init_rate"], "network.init_rate");
  if (j.contains("seed")) n.seed = expect<std::uint64_t>(j["seed"], "network.seed");
}

void merge_optimizer(OptimizerConfig& c, const ordered_json& j) {
  reject_unknown(j, "train.optimizer",
                 {"rule", "learning_rate_weights", "learning_rate_delays", "beta1", "beta2",
                  "epsilon", "seed"});
  if (j.contains("rule")) {
    const auto rule = expect<std::string>(j["rule"], "train.optimizer.rule");
    try {
      c.rule = rule_from_string(rule);
    } catch (const Error& e) {
      throw ConfigError("train.optimizer.rule", e.what());
    }
  }
  if (j.contains("learning_rate_weights"))
    c.learning_rate_weights =
        expect<double>(j["learning_rate_weights"], "train.optimizer.learning_rate_weights");
  if (j.contains("learning_rate_delays"))
    c.learning_rate_delays =
        expect<double>(j["learning_rate_delays"], "train.optimizer.learning_rate_delays");
  if (j.contains("beta1")) c.beta1 = expect<double>(j["beta1"], "train.optimizer.beta1");
  if (j.contains("beta2")) c.beta2 = expect<double>(j["beta2"], "train.optimizer.beta2");
  if (j.contains("epsilon")) c.epsilon = expect<double>(j["epsilon"], "train.optimizer.epsilon");
  if (j.contains("seed")) c.seed = expect<std::uint64_t>(j["seed"], "train.optimizer.seed");
}

void merge_target(TargetSpec& c, const ordered_json& j) {
  reject_unknown(j, "train.target", {"true_class_count", "false_class_count", "window_steps"});
  if (j.contains("true_class_count"))
    c.true_class_count = expect<double>(j["true_class_count"], "train.target.true_class_count");
  if (j.contains("false_class_count"))
    c.false_class_count =
        expect<double>(j["false_class_count"], "train.target.false_class_count");
  if (j.contains("window_steps"))
    c.window_steps = expect<std::size_t>(j["window_steps"], "train.target.window_steps");
}

void merge_train(TrainConfig& c, const ordered_json& j) {
  reject_unknown(j, "train",
                 {"epochs", "batch_size", "optimizer", "target", "refractory_backward",
                  "delay_update_direction"});
  if (j.contains("epochs")) c.epochs = expect<std::size_t>(j["epochs"], "train.epochs");
  if (j.contains("batch_size"))
    c.batch_size = expect<std::size_t>(j["batch_size"], "train.batch_size");
  if (j.contains("optimizer")) merge_optimizer(c.optimizer, j["optimizer"]);
  if (j.contains("target")) merge_target(c.target, j["target"]);
  if (j.contains("refractory_backward")) {
    const auto mode = expect<std::string>(j["refractory_backward"], "train.refractory_backward");
    if (mode == "exact") {
      c.refractory_mode = RefractoryBackward::kExact;
    } else if (mode == "detached") {
      c.refractory_mode = RefractoryBackward::kDetached;
    } else {
      throw ConfigError("train.refractory_backward", "expected exact or detached");
    }
  }
  if (j.contains("delay_update_direction"))
    c.delay_update_direction =
        expect<double>(j["delay_update_direction"], "train.delay_update_direction");
}

void merge_gradcheck(GradcheckConfig& c, const ordered_json& j) {
  reject_unknown(j, "gradcheck",
                 {"layer_sizes", "steps", "spike_rate", "init_rate", "h_sweep", "tolerance",
                  "sign_configs", "seed"});
  if (j.contains("layer_sizes"))
    c.layer_sizes = expect<std::vector<std::size_t>>(j["layer_sizes"], "gradcheck.layer_sizes");
  if (j.contains("steps")) c.steps = expect<std::size_t>(j["steps"], "gradcheck.steps");
  if (j.contains("spike_rate"))
    c.spike_rate = expect<double>(j["spike_rate"], "gradcheck.spike_rate");
  if (j.contains("init_rate"))
    c.init_rate = expect<double>(j["init_rate"], "gradcheck.init_rate");
  if (j.contains("h_sweep"))
    c.h_sweep = expect<std::vector<double>>(j["h_sweep"], "gradcheck.h_sweep");
  if (j.contains("tolerance")) c.tolerance = expect<double>(j["tolerance"], "gradcheck.tolerance");
  if (j.contains("sign_configs"))
    c.sign_configs = expect<std::size_t>(j["sign_configs"], "gradcheck.sign_configs");
  if (j.contains("seed")) c.seed = expect<std::uint64_t>(j["seed"], "gradcheck.seed");
}

void merge_root(RunConfig& cfg, const ordered_json& j) {
  reject_unknown(j, "",
                 {"profile", "dataset", "synth", "network", "train", "gradcheck",
                  "ablate_theta_d", "out_dir", "trials", "seed"});
  if (j.contains("dataset")) merge_dataset(cfg.dataset, j["dataset"]);
  if (j.contains("synth")) merge_synth(cfg.synth, j["synth"]);
  if (j.contains("network")) merge_network(cfg, j["network"]);
  if (j.contains("train")) merge_train(cfg.train, j["train"]);
  if (j.contains("gradcheck")) merge_gradcheck(cfg.gradcheck, j["gradcheck"]);
  if (j.contains("ablate_theta_d")) {
    cfg.ablate_theta_d.clear();
    for (const auto& v : j["ablate_theta_d"])
      cfg.ablate_theta_d.push_back(theta_d_value(v, "ablate_theta_d"));
  }
  if (j.contains("out_dir")) cfg.out_dir = expect<std::string>(j["out_dir"], "out_dir");
  if (j.contains("trials")) cfg.trials = expect<std::size_t>(j["trials"], "trials");
  if (j.contains("seed")) cfg.seed = expect<std::uint64_t>(j["seed"], "seed");
}

}  // namespace

void RunConfig::validate() const {
  namespace fs = std::filesystem;
  if (profile != "synth" && profile != "nmnist" && profile != "dvsgesture" &&
      profile != "ntidigits") {
    throw ConfigError("profile", "unknown profile '" + profile + "'");
  }
  if (dataset.format != "canonical" && dataset.format != "csv") {
    throw ConfigError("dataset.format", "expected canonical or csv");
  }
  if (!dataset.train_dir.empty() && !fs::exists(dataset.train_dir)) {
    throw ConfigError("dataset.train_dir", "path does not exist: " + dataset.train_dir);
  }
  if (!dataset.test_dir.empty() && !fs::exists(dataset.test_dir)) {
    throw ConfigError("dataset.test_dir", "path does not exist: " + dataset.test_dir);
  }
  if (dataset.train_dir.empty() != dataset.test_dir.empty()) {
    throw ConfigError("dataset.test_dir", "train_dir and test_dir must be set together");
  }
  if (hidden_sizes.empty()) throw ConfigError("network.hidden_sizes", "must not be empty");
  for (std::size_t s : hidden_sizes)
    if (s == 0) throw ConfigError("network.hidden_sizes", "sizes must be positive");
  if (trials == 0) throw ConfigError("trials", "must be at least 1");
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");

  try {
    NetworkSpec probe = network;
    probe.layer_sizes = {1};
    probe.layer_sizes.insert(probe.layer_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
    probe.layer_sizes.push_back(1);
    probe.validate();
  } catch (const Error& e) {
    throw ConfigError("network", e.what());
  }
  try {
    train.validate();
  } catch (const Error& e) {
    throw ConfigError("train", e.what());
  }
  if (dataset.train_dir.empty()) {
    if (synth.params.class_count < 2) throw ConfigError("synth.class_count", "need >= 2 classes");
    if (synth.params.channel_count < synth.params.class_count) {
      throw ConfigError("synth.channel_count", "need at least one channel per class");
    }
    if (synth.params.samples_per_class < 1 || synth.test_samples_per_class < 1) {
      throw ConfigError("synth.samples_per_class", "need at least one sample per class");
    }
  }
  if (gradcheck.layer_sizes.size() < 2) {
    throw ConfigError("gradcheck.layer_sizes", "need at least input and output sizes");
  }
  if (gradcheck.steps == 0) throw ConfigError("gradcheck.steps", "must be positive");
  if (gradcheck.tolerance <= 0) throw ConfigError("gradcheck.tolerance", "must be positive");
  for (double h : gradcheck.h_sweep)
    if (h <= 0) throw ConfigError("gradcheck.h_sweep", "steps must be positive");
  if (gradcheck.spike_rate <= 0 || gradcheck.spike_rate > 1) {
    throw ConfigError("gradcheck.spike_rate", "must lie in (0, 1]");
  }
}

void apply_profile(RunConfig& config, const std::string& name) {
  config.profile = name;
  if (name == "nmnist") {
    config.network.tau_s_ms = 1.0;
    config.network.tau_r_ms = 1.0;
    config.network.theta_d_ms = 64.0;
  } else if (name == "dvsgesture") {
    config.network.tau_s_ms = 5.0;
    config.network.tau_r_ms = 5.0;
    config.network.theta_d_ms = 64.0;
  } else if (name == "ntidigits") {
    config.network.tau_s_ms = 5.0;
    config.network.tau_r_ms = 5.0;
    config.network.theta_d_ms = 128.0;
  } else if (name == "synth") {
    // Wide kernels relative to the generator's 2 ms jitter; narrow ones leave
    // the coincidence detector no slack and the task stalls at chance.
    config.network.tau_s_ms = 5.0;
    config.network.tau_r_ms = 5.0;
    config.network.theta_d_ms = 64.0;
  } else {
    throw ConfigError("profile", "unknown profile '" + name + "'");
  }
  config.network.theta_u = 10.0;
  config.network.sample_time_ms = 1.0;
}

RunConfig default_config() {
  RunConfig config;
  apply_profile(config, "synth");
  return config;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw ConfigError(origin, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin, "top level must be a JSON object");
  RunConfig config = default_config();
  if (j.contains("profile"))
    apply_profile(config, expect<std::string>(j["profile"], "profile"));
  merge_root(config, j);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path);
}

double parse_theta_d(const std::string& token) {
  if (token == "inf" || token == "+inf") return kInf;
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ConfigError("theta_d", "expected a non-negative number or \"inf\", got '" + token + "'");
  }
  if (used != token.size() || std::isnan(value) || value < 0) {
    throw ConfigError("theta_d", "expected a non-negative number or \"inf\", got '" + token + "'");
  }
  return value;
}

std::string effective_config_json(const RunConfig& config) {
  ordered_json j;
  j["profile"] = config.profile;
  j["dataset"] = {{"train_dir", config.dataset.train_dir},
                  {"test_dir", config.dataset.test_dir},
                  {"format", config.dataset.format},
                  {"split_polarity", config.dataset.split_polarity}};
  const SynthParams& p = config.synth.params;
  j["synth"] = {{"class_count", p.class_count},
                {"channel_count", p.channel_count},
                {"samples_per_class", p.samples_per_class},
                {"test_samples_per_class", config.synth.test_samples_per_class},
                {"duration_ms", p.duration_ms},
                {"spikes_per_channel", p.spikes_per_channel},
                {"anchor_start_ms", p.anchor_start_ms},
                {"anchor_gap_ms", p.anchor_gap_ms},
                {"micro_offset_span_ms", p.micro_offset_span_ms},
                {"jitter_ms", p.jitter_ms},
                {"train_seed", config.synth.train_seed},
                {"test_seed", config.synth.test_seed}};
  const NetworkSpec& n = config.network;
  j["network"] = {
      {"hidden_sizes", config.hidden_sizes},
      {"delays_enabled", n.delays_enabled},
      {"theta_d_ms", theta_d_json(n.theta_d_ms)},
      {"theta_u", n.theta_u},
      {"sample_time_ms", n.sample_time_ms},
      {"tau_s_ms", n.tau_s_ms},
      {"tau_r_ms", n.tau_r_ms},
      {"surrogate",
       {{"kind", n.surrogate.kind == SurrogateKind::kExponential ? "exponential"
                                                                 : "fast_sigmoid"},
        {"scale", n.surrogate.scale},
        {"sharpness", n.surrogate.sharpness}}},
      {"init_rate", n.init_rate},
      {"seed", n.seed}};
  const TrainConfig& t = config.train;
  j["train"] = {
      {"epochs", t.epochs},
      {"batch_size", t.batch_size},
      {"optimizer",
       {{"rule", to_string(t.optimizer.rule)},
        {"learning_rate_weights", t.optimizer.learning_rate_weights},
        {"learning_rate_delays", t.optimizer.learning_rate_delays},
        {"beta1", t.optimizer.beta1},
        {"beta2", t.optimizer.beta2},
        {"epsilon", t.optimizer.epsilon},
        {"seed", t.optimizer.seed}}},
      {"target",
       {{"true_class_count", t.target.true_class_count},
        {"false_class_count", t.target.false_class_count},
        {"window_steps", t.target.window_steps}}},
      {"refractory_backward",
       t.refractory_mode == RefractoryBackward::kExact ? "exact" : "detached"},
      {"delay_update_direction", t.delay_update_direction}};
  const GradcheckConfig& g = config.gradcheck;
  j["gradcheck"] = {{"layer_sizes", g.layer_sizes}, {"steps", g.steps},
                    {"spike_rate", g.spike_rate},   {"init_rate", g.init_rate},
                    {"h_sweep", g.h_sweep},         {"tolerance", g.tolerance},
                    {"sign_configs", g.sign_configs}, {"seed", g.seed}};
  ordered_json ablate = ordered_json::array();
  for (double v : config.ablate_theta_d) ablate.push_back(theta_d_json(v));
  j["ablate_theta_d"] = ablate;
  j["out_dir"] = config.out_dir;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

}  // namespace radsnn
