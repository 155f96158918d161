#include "radsnn/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "radsnn/checkpoint.hpp"
#include "radsnn/gradcheck.hpp"

namespace radsnn {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string format_theta_d(double theta_d) {
  if (std::isinf(theta_d)) return "+inf";
  std::ostringstream os;
  os << theta_d;
  return os.str();
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << text;
  RAD_CHECK(bool(os), "write failed for ", path.string());
}

struct LoadedData {
  Dataset train;
  Dataset test;
  std::size_t input_channels = 0;
  std::size_t class_count = 0;
};

Dataset load_dir(const std::string& dir, const DatasetConfig& dataset, double sample_time_ms) {
  const EventFormat format = dataset.format == "csv" ? EventFormat::kCsv
                                                     : EventFormat::kCanonicalBinary;
  const std::string extension = dataset.format == "csv" ? ".csv" : ".rade";
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      paths.push_back(entry.path());
    }
  }
  RAD_CHECK(!paths.empty(), "no ", extension, " files under ", dir);
  std::sort(paths.begin(), paths.end());
  std::vector<EventStream> streams;
  streams.reserve(paths.size());
  for (const fs::path& p : paths) streams.push_back(load_events(p.string(), format));
  return rasterize_all(streams, sample_time_ms, dataset.split_polarity);
}

LoadedData load_data(const RunConfig& config) {
  LoadedData data;
  if (!config.dataset.train_dir.empty()) {
    data.train = load_dir(config.dataset.train_dir, config.dataset,
                          config.network.sample_time_ms);
    data.test =
        load_dir(config.dataset.test_dir, config.dataset, config.network.sample_time_ms);
  } else {
    SynthParams test_params = config.synth.params;
    test_params.samples_per_class = config.synth.test_samples_per_class;
    data.train = rasterize_all(synth_temporal_task(config.synth.params, config.synth.train_seed),
                               config.network.sample_time_ms, false);
    data.test = rasterize_all(synth_temporal_task(test_params, config.synth.test_seed),
                              config.network.sample_time_ms, false);
  }
  RAD_CHECK(data.train.size() > 0 && data.test.size() > 0, "datasets must be nonempty");
  data.input_channels = data.train.samples.front().neurons;
  for (const SpikeRaster& r : data.train.samples) {
    RAD_CHECK(r.neurons == data.input_channels, "inconsistent channel counts in training data");
  }
  for (const SpikeRaster& r : data.test.samples) {
    RAD_CHECK(r.neurons == data.input_channels, "inconsistent channel counts in test data");
  }
  std::uint16_t max_label = 0;
  for (std::uint16_t l : data.train.labels) max_label = std::max(max_label, l);
  for (std::uint16_t l : data.test.labels) max_label = std::max(max_label, l);
  data.class_count = static_cast<std::size_t>(max_label) + 1;
  return data;
}

NetworkSpec make_spec(const RunConfig& config, const LoadedData& data, double theta_d,
                      std::uint64_t net_seed) {
  NetworkSpec spec = config.network;
  spec.layer_sizes.clear();
  spec.layer_sizes.push_back(data.input_channels);
  spec.layer_sizes.insert(spec.layer_sizes.end(), config.hidden_sizes.begin(),
                          config.hidden_sizes.end());
  spec.layer_sizes.push_back(data.class_count);
  spec.theta_d_ms = theta_d;
  spec.seed = net_seed;
  return spec;
}

void write_report_csv(const fs::path& path, const TrainReport& report) {
  std::ostringstream os;
  os << "epoch,train_loss,train_accuracy,test_loss,test_accuracy\n";
  for (const EpochRow& row : report.epochs) {
    os << row.epoch << ',' << csv_number(row.train_loss) << ','
       << csv_number(row.train_accuracy) << ',' << csv_number(row.test_loss) << ','
       << csv_number(row.test_accuracy) << '\n';
  }
  write_text(path, os.str());
}

void write_delays_csv(const fs::path& path, const TrainReport& report) {
  std::ostringstream os;
  os << "epoch,layer,min_ms,max_ms,mean_ms,at_floor,at_cap";
  for (int b = 0; b < 8; ++b) os << ",bin" << b;
  os << '\n';
  for (std::size_t e = 0; e < report.delay_history.size(); ++e) {
    for (const DelayStats& s : report.delay_history[e]) {
      os << (e + 1) << ',' << s.layer << ',' << csv_number(s.min_ms) << ','
         << csv_number(s.max_ms) << ',' << csv_number(s.mean_ms) << ',' << s.at_floor << ','
         << s.at_cap;
      for (std::size_t v : s.histogram) os << ',' << v;
      os << '\n';
    }
  }
  write_text(path, os.str());
}

struct TrialOutcome {
  std::uint64_t net_seed = 0;
  std::uint64_t shuffle_seed = 0;
  double final_test_accuracy = 0.0;
  double final_test_loss = 0.0;
  double final_train_accuracy = 0.0;
};

struct RunSetResult {
  std::vector<TrialOutcome> trials;
  std::size_t weight_params = 0;
  std::size_t delay_params = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double best = 0.0;
};

// Trains config.trials networks on the same data with trial-offset seeds.
RunSetResult run_trials(const RunConfig& config, const LoadedData& data, double theta_d,
                        const fs::path& out_dir, bool quiet = false) {
  RunSetResult result;
  for (std::size_t t = 0; t < config.trials; ++t) {
    TrialOutcome outcome;
    outcome.net_seed = config.seed + 2 * t;
    outcome.shuffle_seed = config.seed + 2 * t + 1;
    const NetworkSpec spec = make_spec(config, data, theta_d, outcome.net_seed);
    Network net = build_network(spec);
    OptimizerConfig opt_config = config.train.optimizer;
    opt_config.seed = outcome.shuffle_seed;
    Optimizer opt(opt_config);
    const TrainReport report = run_training(net, opt, data.train, data.test, config.train);

    result.weight_params = report.weight_params;
    result.delay_params = report.delay_params;
    const EpochRow& last = report.epochs.back();
    outcome.final_test_accuracy = last.test_accuracy;
    outcome.final_test_loss = last.test_loss;
    outcome.final_train_accuracy = last.train_accuracy;
    result.trials.push_back(outcome);

    const fs::path trial_dir = out_dir / ("trial_" + std::to_string(t));
    fs::create_directories(trial_dir);
    write_report_csv(trial_dir / "report.csv", report);
    if (!report.delay_history.empty() && !report.delay_history.front().empty()) {
      write_delays_csv(trial_dir / "delays.csv", report);
    }
    save_checkpoint(net, opt, (trial_dir / "checkpoint.radc").string());
    if (!quiet) {
      std::cout << "trial " << t << ": test accuracy "
                << csv_number(last.test_accuracy) << " (train "
                << csv_number(last.train_accuracy) << ", "
                << csv_number(report.wall_clock_seconds) << " s)\n";
    }
  }
  double sum = 0.0;
  for (const TrialOutcome& o : result.trials) {
    sum += o.final_test_accuracy;
    result.best = std::max(result.best, o.final_test_accuracy);
  }
  result.mean = sum / static_cast<double>(result.trials.size());
  double var = 0.0;
  for (const TrialOutcome& o : result.trials) {
    const double d = o.final_test_accuracy - result.mean;
    var += d * d;
  }
  result.stddev = std::sqrt(var / static_cast<double>(result.trials.size()));
  return result;
}

ordered_json summary_json(const RunConfig& config, const RunSetResult& result,
                          double theta_d) {
  ordered_json per_trial = ordered_json::array();
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    const TrialOutcome& o = result.trials[t];
    per_trial.push_back({{"trial", t},
                         {"net_seed", o.net_seed},
                         {"shuffle_seed", o.shuffle_seed},
                         {"final_test_accuracy", o.final_test_accuracy},
                         {"final_test_loss", o.final_test_loss},
                         {"final_train_accuracy", o.final_train_accuracy}});
  }
  ordered_json j;
  j["profile"] = config.profile;
  j["theta_d_ms"] = std::isinf(theta_d) ? ordered_json("inf") : ordered_json(theta_d);
  j["trials"] = config.trials;
  j["base_seed"] = config.seed;
  j["epochs"] = config.train.epochs;
  j["params"] = {{"weights", result.weight_params},
                 {"delays", result.delay_params},
                 {"total", result.weight_params + result.delay_params}};
  j["test_accuracy"] = {{"best", result.best}, {"mean", result.mean}, {"std", result.stddev}};
  j["per_trial"] = per_trial;
  return j;
}

SpikeRaster load_sample(const std::string& path, const RunConfig& config) {
  const bool csv = fs::path(path).extension() == ".csv";
  EventStream stream =
      load_events(path, csv ? EventFormat::kCsv : EventFormat::kCanonicalBinary);
  stream.split_polarity = config.dataset.split_polarity;
  return rasterize(stream, config.network.sample_time_ms);
}

}  // namespace

int cmd_train(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "effective_config.json",
             effective_config_json(config));
  const LoadedData data = load_data(config);
  const RunSetResult result = run_trials(config, data, config.network.theta_d_ms,
                                         config.out_dir);
  const ordered_json summary = summary_json(config, result, config.network.theta_d_ms);
  write_text(fs::path(config.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << "mean test accuracy " << csv_number(result.mean) << " +/- "
            << csv_number(result.stddev) << " (best " << csv_number(result.best) << ") over "
            << config.trials << " trials\n";
  return 0;
}

int cmd_eval(const RunConfig& config, const std::string& checkpoint_path) {
  config.validate();
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const LoadedData data = load_data(config);
  RAD_CHECK(data.class_count == ckpt.network.spec.class_count(),
            "dataset has ", data.class_count, " classes but the checkpoint network has ",
            ckpt.network.spec.class_count());
  RAD_CHECK(data.input_channels == ckpt.network.spec.input_channels(),
            "dataset has ", data.input_channels, " channels but the checkpoint network has ",
            ckpt.network.spec.input_channels());
  const Evaluation ev = evaluate(ckpt.network, data.test, config.train.target);

  fs::create_directories(config.out_dir);
  ordered_json j;
  j["checkpoint"] = checkpoint_path;
  j["samples"] = data.test.size();
  j["accuracy"] = ev.accuracy;
  j["mean_loss"] = ev.mean_loss;
  j["no_spike_samples"] = ev.no_spike_count;
  ordered_json confusion = ordered_json::array();
  for (std::size_t i = 0; i < ev.confusion.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < ev.confusion.cols(); ++k)
      row.push_back(ev.confusion.at(i, k));
    confusion.push_back(row);
  }
  j["confusion"] = confusion;
  write_text(fs::path(config.out_dir) / "eval.json", j.dump(2) + "\n");
  std::cout << "accuracy " << csv_number(ev.accuracy) << " mean loss "
            << csv_number(ev.mean_loss) << " over " << data.test.size() << " samples\n";
  return 0;
}

int cmd_ablate(const RunConfig& config) {
  config.validate();
  if (config.ablate_theta_d.empty()) {
    throw ConfigError("ablate_theta_d", "must list at least one threshold");
  }
  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "effective_config.json",
             effective_config_json(config));
  const LoadedData data = load_data(config);

  std::ostringstream table;
  table << "theta_d,weight_params,delay_params,accuracy_mean,accuracy_std,accuracy_best\n";
  for (double theta_d : config.ablate_theta_d) {
    const std::string label = format_theta_d(theta_d);
    std::cout << "theta_d = " << label << "\n";
    const fs::path sub = fs::path(config.out_dir) / ("theta_" + label);
    fs::create_directories(sub);
    const RunSetResult result = run_trials(config, data, theta_d, sub);
    write_text(sub / "summary.json", summary_json(config, result, theta_d).dump(2) + "\n");
    table << label << ',' << result.weight_params << ',' << result.delay_params << ','
          << csv_number(result.mean) << ',' << csv_number(result.stddev) << ','
          << csv_number(result.best) << '\n';
  }
  write_text(fs::path(config.out_dir) / "ablation.csv", table.str());
  std::cout << "wrote " << (fs::path(config.out_dir) / "ablation.csv").string() << "\n";
  return 0;
}

int cmd_analyze(const RunConfig& config, const std::string& checkpoint_path,
                const std::string& sample_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const SpikeRaster sample = load_sample(sample_path, config);
  RAD_CHECK(sample.neurons == ckpt.network.spec.input_channels(),
            "sample has ", sample.neurons, " channels but the checkpoint network expects ",
            ckpt.network.spec.input_channels());
  const CumulativeTrace trace = cumulative_trace(ckpt.network, sample);

  fs::create_directories(config.out_dir);
  std::ostringstream cum;
  for (std::size_t i = 0; i < trace.counts.rows(); ++i) {
    cum << (i ? "," : "") << "class" << i;
  }
  cum << '\n';
  for (std::size_t n = 0; n < trace.counts.cols(); ++n) {
    for (std::size_t i = 0; i < trace.counts.rows(); ++i) {
      cum << (i ? "," : "") << trace.counts.at(i, n);
    }
    cum << '\n';
  }
  write_text(fs::path(config.out_dir) / "cumulative.csv", cum.str());

  std::ostringstream totals;
  totals << "class,total_spikes\n";
  const std::size_t last = trace.counts.cols() - 1;
  for (std::size_t i = 0; i < trace.counts.rows(); ++i) {
    totals << i << ',' << trace.counts.at(i, last) << '\n';
  }
  write_text(fs::path(config.out_dir) / "totals.csv", totals.str());

  std::size_t predicted = 0;
  for (std::size_t i = 1; i < trace.counts.rows(); ++i) {
    if (trace.counts.at(i, last) > trace.counts.at(predicted, last)) predicted = i;
  }
  ordered_json j;
  j["checkpoint"] = checkpoint_path;
  j["sample"] = sample_path;
  j["decision_time_ms"] = trace.decision_time_ms;
  j["duration_ms"] = static_cast<double>(last) * trace.sample_time_ms;
  j["predicted_class"] = predicted;
  write_text(fs::path(config.out_dir) / "decision.json", j.dump(2) + "\n");
  std::cout << "decision time " << trace.decision_time_ms << " ms, predicted class "
            << predicted << "\n";
  return 0;
}

int cmd_gradcheck(const RunConfig& config) {
  config.validate();
  const GradcheckConfig& g = config.gradcheck;

  NetworkSpec spec;
  spec.layer_sizes = g.layer_sizes;
  spec.theta_d_ms = 16.0;
  spec.seed = g.seed;
  spec.init_rate = g.init_rate;
  spec.surrogate = config.network.surrogate;
  Network net = build_network(spec);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> delay_dist(1.0, spec.theta_d_ms - 1.0);
  for (SrmLayerParams& layer : net.layers) {
    if (!layer.has_delay) continue;
    for (double& d : layer.delay.raw) d = delay_dist(rng);
    layer.delay.reclamp();
  }
  SpikeRaster sample(spec.input_channels(), g.steps, spec.sample_time_ms);
  std::bernoulli_distribution fire(g.spike_rate);
  for (std::uint8_t& v : sample.data) v = fire(rng) ? 1 : 0;
  const std::size_t label = 0;
  const TargetSpec target;
  const double sharpness = net.spec.surrogate.sharpness;

  bool pass = true;
  ordered_json sweep = ordered_json::array();
  for (double h : g.h_sweep) {
    const GradCheckReport report =
        grad_check(net, sample, label, target, sharpness, h, g.tolerance);
    sweep.push_back({{"h", h},
                     {"max_rel_error_weights", report.max_rel_error_weights},
                     {"worst_weight", report.worst_weight},
                     {"pass", report.pass}});
    std::cout << "h = " << h << ": max weight rel error " << report.max_rel_error_weights
              << (report.pass ? " (pass)" : " (FAIL at " + report.worst_weight + ")") << "\n";
    pass = pass && report.pass;
  }

  const SignAgreementResult signs = sign_agreement_study(g.seed, g.sign_configs);
  std::cout << "delay sign agreement over " << signs.checked
            << " parameters: analytic " << csv_number(signs.analytic_fraction())
            << ", printed estimator " << csv_number(signs.estimator_fraction()) << "\n";
  const bool sign_pass = signs.analytic_fraction() >= 0.95;
  pass = pass && sign_pass;

  ordered_json j;
  j["tolerance"] = g.tolerance;
  j["sharpness"] = sharpness;
  j["layer_sizes"] = g.layer_sizes;
  j["steps"] = g.steps;
  j["h_sweep"] = sweep;
  j["sign_agreement"] = {{"configs", g.sign_configs},
                         {"checked_parameters", signs.checked},
                         {"analytic_fraction", signs.analytic_fraction()},
                         {"estimator_fraction", signs.estimator_fraction()},
                         {"pass", sign_pass}};
  j["pass"] = pass;
  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "gradcheck.json", j.dump(2) + "\n");
  return pass ? 0 : 1;
}

int cmd_synth(const RunConfig& config) {
  config.validate();
  const fs::path out(config.out_dir);
  fs::create_directories(out / "train");
  fs::create_directories(out / "test");
  write_text(out / "effective_config.json", effective_config_json(config));

  SynthParams test_params = config.synth.params;
  test_params.samples_per_class = config.synth.test_samples_per_class;
  const auto train_streams = synth_temporal_task(config.synth.params, config.seed);
  const auto test_streams = synth_temporal_task(test_params, config.seed + 1);

  auto dump = [](const std::vector<EventStream>& streams, const fs::path& dir) {
    for (std::size_t k = 0; k < streams.size(); ++k) {
      std::ostringstream name;
      name << "sample_" << std::setw(4) << std::setfill('0') << k << "_label"
           << streams[k].label << ".rade";
      write_events(streams[k], (dir / name.str()).string());
    }
  };
  dump(train_streams, out / "train");
  dump(test_streams, out / "test");
  std::cout << "wrote " << train_streams.size() << " train and " << test_streams.size()
            << " test samples under " << out.string() << "\n";
  return 0;
}

}  // namespace radsnn
