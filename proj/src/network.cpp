#include "radsnn/network.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "radsnn/rad_delay.hpp"

namespace radsnn {

void NetworkSpec::validate() const {
  RAD_CHECK(layer_sizes.size() >= 2, "network needs at least an input and an output layer");
  for (std::size_t s : layer_sizes) RAD_CHECK(s > 0, "layer sizes must be positive");
  RAD_CHECK(theta_u > 0, "theta_u must be positive");
  RAD_CHECK(sample_time_ms > 0, "sample time must be positive");
  RAD_CHECK(tau_s_ms > 0 && tau_r_ms > 0, "kernel time constants must be positive");
  RAD_CHECK(!std::isnan(theta_d_ms) && theta_d_ms >= 0,
            "theta_d must be non-negative (finite or +inf)");
  RAD_CHECK(init_rate > 0, "init_rate must be positive");
}

std::size_t NetworkSpec::weight_param_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    count += layer_sizes[l] * layer_sizes[l + 1];
  return count;
}

std::size_t NetworkSpec::delay_param_count() const {
  if (!delays_effective()) return 0;
  std::size_t count = 0;
  for (std::size_t l = 1; l + 1 < layer_sizes.size(); ++l) count += layer_sizes[l];
  return count;
}

Network build_network(const NetworkSpec& spec) {
  spec.validate();
  Network net;
  net.spec = spec;
  net.response =
      tabulate(KernelKind::kResponse, spec.tau_s_ms, spec.theta_u, spec.sample_time_ms);
  net.refractory =
      tabulate(KernelKind::kRefractory, spec.tau_r_ms, spec.theta_u, spec.sample_time_ms);
  std::mt19937_64 rng(spec.seed);
  const std::size_t layer_count = spec.layer_count();
  net.layers.reserve(layer_count);
  for (std::size_t l = 0; l < layer_count; ++l) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    SrmLayerParams layer;
    layer.weights = Grid(out, in);
    const double c = spec.theta_u / (spec.init_rate * static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-c, c);
    for (double& w : layer.weights.data()) w = dist(rng);
    if (l + 1 < layer_count && spec.delays_enabled) {
      layer.has_delay = true;
      layer.delay = DelayState::zeros(out, spec.theta_d_ms);
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

ForwardTrace network_forward(const Network& net, const SpikeRaster& input) {
  RAD_CHECK(input.neurons == net.spec.input_channels(), "input has ", input.neurons,
            " channels, network expects ", net.spec.input_channels());
  RAD_CHECK(input.sample_time_ms == net.spec.sample_time_ms,
            "input sample time does not match network");
  ForwardTrace trace;
  trace.layers.reserve(net.layers.size());
  const SpikeRaster* current = &input;
  for (const SrmLayerParams& layer : net.layers) {
    LayerTrace lt;
    lt.record = layer_forward(*current, layer, net.response, net.refractory, net.spec.theta_u);
    lt.shifted = layer.has_delay ? shift_spikes(lt.record.spikes, layer.delay)
                                 : lt.record.spikes;
    trace.layers.push_back(std::move(lt));
    current = &trace.layers.back().shifted;
  }
  return trace;
}

SpikeRaster network_output(const Network& net, const SpikeRaster& input) {
  ForwardTrace trace = network_forward(net, input);
  return std::move(trace.layers.back().shifted);
}

void NetworkGradients::accumulate(const NetworkGradients& other) {
  RAD_CHECK(weights.size() == other.weights.size() && delays.size() == other.delays.size(),
            "gradient layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    RAD_CHECK(delays[l].size() == other.delays[l].size(), "delay gradient size mismatch");
    for (std::size_t i = 0; i < delays[l].size(); ++i) delays[l][i] += other.delays[l][i];
  }
}

void NetworkGradients::scale(double factor) {
  for (Grid& g : weights) g *= factor;
  for (std::vector<double>& d : delays)
    for (double& v : d) v *= factor;
}

NetworkGradients zero_gradients(const Network& net) {
  NetworkGradients grads;
  grads.weights.reserve(net.layers.size());
  grads.delays.reserve(net.layers.size());
  for (const SrmLayerParams& layer : net.layers) {
    grads.weights.emplace_back(layer.out_neurons(), layer.in_neurons());
    grads.delays.emplace_back(layer.has_delay ? layer.out_neurons() : 0, 0.0);
  }
  return grads;
}

NetworkGradients network_backward(const Network& net, const ForwardTrace& trace,
                                  const Grid& upstream_grad, RefractoryBackward mode) {
  RAD_CHECK(trace.layers.size() == net.layers.size(), "trace does not match network");
  NetworkGradients grads = zero_gradients(net);
  Grid g = upstream_grad;  // dL/d(layer l's post-delay output) while descending
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const SrmLayerParams& layer = net.layers[l];
    const LayerTrace& lt = trace.layers[l];
    if (layer.has_delay) {
      grads.delays[l] = delay_gradient(lt.shifted, g, net.spec.sample_time_ms);
      g = unshift_gradient(g, layer.delay, net.spec.sample_time_ms);
    }
    const bool want_input = l > 0;
    LayerBackwardResult back =
        layer_backward(lt.record, g, layer, net.response, net.refractory, net.spec.theta_u,
                       net.spec.surrogate, mode, want_input);
    grads.weights[l] = std::move(back.grad_weights);
    if (want_input) g = std::move(back.grad_input);
  }
  return grads;
}

Dataset rasterize_all(const std::vector<EventStream>& streams, double sample_time_ms,
                      bool split_polarity) {
  Dataset data;
  data.samples.reserve(streams.size());
  data.labels.reserve(streams.size());
  for (const EventStream& stream : streams) {
    EventStream adjusted = stream;
    adjusted.split_polarity = split_polarity;
    data.samples.push_back(rasterize(adjusted, sample_time_ms));
    data.labels.push_back(stream.label);
  }
  return data;
}

void TrainConfig::validate() const {
  RAD_CHECK(epochs > 0, "epoch count must be positive");
  RAD_CHECK(batch_size > 0, "batch size must be positive");
  RAD_CHECK(std::isfinite(delay_update_direction) && delay_update_direction != 0,
            "delay update direction must be a nonzero finite factor");
  optimizer.validate();
  target.validate();
}

EpochRow train_epoch(Network& net, Optimizer& opt, const Dataset& train,
                     const TrainConfig& config, std::mt19937_64& shuffle_rng) {
  config.validate();
  RAD_CHECK(train.size() > 0, "training set is empty");
  RAD_CHECK(train.samples.size() == train.labels.size(), "sample/label count mismatch");

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), shuffle_rng);

  const bool train_delays = net.spec.delays_effective();
  double loss_sum = 0.0;
  std::size_t correct = 0;
  NetworkGradients batch = zero_gradients(net);
  std::size_t in_batch = 0;

  auto flush = [&] {
    if (in_batch == 0) return;
    batch.scale(1.0 / static_cast<double>(in_batch));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      SrmLayerParams& layer = net.layers[l];
      opt.apply(2 * l, opt.config().learning_rate_weights, std::span<double>(layer.weights.data()),
                std::span<const double>(batch.weights[l].data()));
      if (layer.has_delay && train_delays) {
        std::vector<double>& dg = batch.delays[l];
        for (double& v : dg) v *= config.delay_update_direction;
        opt.apply(2 * l + 1, opt.config().learning_rate_delays, std::span<double>(layer.delay.raw),
                  std::span<const double>(dg));
        layer.delay.reclamp();
      }
    }
    batch = zero_gradients(net);
    in_batch = 0;
  };

  for (std::size_t idx : order) {
    const SpikeRaster& sample = train.samples[idx];
    const std::uint16_t label = train.labels[idx];
    RAD_CHECK(label < net.spec.class_count(), "label ", label, " out of range");
    ForwardTrace trace = network_forward(net, sample);
    const TargetSpec target = config.target.for_window(sample.steps);
    const double loss = count_loss(trace.output(), target, label);
    RAD_CHECK(std::isfinite(loss), "non-finite loss ", loss, " on sample ", idx,
              "; epoch aborted");
    loss_sum += loss;
    if (classify(trace.output()) == label) ++correct;
    const Grid upstream = count_loss_gradient(trace.output(), target, label);
    batch.accumulate(network_backward(net, trace, upstream, config.refractory_mode));
    ++in_batch;
    if (in_batch == config.batch_size) flush();
  }
  flush();

  EpochRow row;
  row.train_loss = loss_sum / static_cast<double>(train.size());
  row.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
  return row;
}

Evaluation evaluate(const Network& net, const Dataset& data, const TargetSpec& target) {
  RAD_CHECK(data.size() > 0, "evaluation set is empty");
  RAD_CHECK(data.samples.size() == data.labels.size(), "sample/label count mismatch");
  const std::size_t classes = net.spec.class_count();
  Evaluation result;
  result.confusion = Grid(classes, classes);
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const std::uint16_t label = data.labels[idx];
    RAD_CHECK(label < classes, "label ", label, " out of range");
    const SpikeRaster out = network_output(net, data.samples[idx]);
    loss_sum += count_loss(out, target.for_window(out.steps), label);
    const std::size_t predicted = classify(out);
    if (out.total_spikes() == 0) ++result.no_spike_count;
    if (predicted == label) ++correct;
    result.confusion.at(label, predicted) += 1.0;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  result.mean_loss = loss_sum / static_cast<double>(data.size());
  return result;
}

TrainReport run_training(Network& net, Optimizer& opt, const Dataset& train,
                         const Dataset& test, const TrainConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  report.weight_params = net.spec.weight_param_count();
  report.delay_params = net.spec.delay_param_count();
  std::mt19937_64 shuffle_rng(opt.config().seed);
  for (std::size_t e = 1; e <= config.epochs; ++e) {
    EpochRow row = train_epoch(net, opt, train, config, shuffle_rng);
    row.epoch = e;
    if (test.size() > 0) {
      const Evaluation ev = evaluate(net, test, config.target);
      row.test_loss = ev.mean_loss;
      row.test_accuracy = ev.accuracy;
    }
    report.epochs.push_back(row);
    report.delay_history.push_back(delay_stats(net));
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<DelayStats> delay_stats(const Network& net) {
  std::vector<DelayStats> stats;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const SrmLayerParams& layer = net.layers[l];
    if (!layer.has_delay) continue;
    const std::vector<double>& d = layer.delay.clamped;
    DelayStats s;
    s.layer = l;
    s.min_ms = *std::min_element(d.begin(), d.end());
    s.max_ms = *std::max_element(d.begin(), d.end());
    s.mean_ms = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    const double theta_d = layer.delay.theta_d;
    for (double v : d) {
      if (v == 0.0) ++s.at_floor;
      if (std::isfinite(theta_d) && v == theta_d) ++s.at_cap;
    }
    const double cap =
        std::isfinite(theta_d) && theta_d > 0 ? theta_d : std::max(s.max_ms, 1.0);
    s.histogram.assign(8, 0);
    for (double v : d) {
      const auto bin = static_cast<std::size_t>(
          std::min(7.0, std::floor(v / cap * 8.0)));
      ++s.histogram[bin];
    }
    stats.push_back(std::move(s));
  }
  return stats;
}

CumulativeTrace cumulative_trace(const Network& net, const SpikeRaster& sample) {
  return cumulative_from_output(network_output(net, sample));
}

CumulativeTrace cumulative_from_output(const SpikeRaster& out) {
  CumulativeTrace trace;
  trace.sample_time_ms = out.sample_time_ms;
  trace.counts = Grid(out.neurons, out.steps);
  for (std::size_t i = 0; i < out.neurons; ++i) {
    double running = 0.0;
    double* dst = trace.counts.row(i);
    const std::uint8_t* src = out.row(i);
    for (std::size_t n = 0; n < out.steps; ++n) {
      running += src[n];
      dst[n] = running;
    }
  }
  auto argmax_at = [&](std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.neurons; ++i)
      if (trace.counts.at(i, n) > trace.counts.at(best, n)) best = i;
    return best;
  };
  const std::size_t final_class = argmax_at(out.steps - 1);
  std::size_t decision_step = 0;
  for (std::size_t n = out.steps; n-- > 0;) {
    if (argmax_at(n) != final_class) {
      decision_step = n + 1;
      break;
    }
  }
  trace.decision_time_ms = static_cast<double>(decision_step) * out.sample_time_ms;
  return trace;
}

}  // namespace radsnn
