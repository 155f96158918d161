#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "radsnn/events.hpp"
#include "radsnn/kernels.hpp"
#include "radsnn/loss.hpp"
#include "radsnn/optimizer.hpp"
#include "radsnn/srm_layer.hpp"

namespace radsnn {

struct NetworkSpec {
  std::vector<std::size_t> layer_sizes;  // input channels, hidden sizes..., class count
  bool delays_enabled = true;            // false builds a plain delay-free net
  double theta_d_ms = 64.0;              // delay cap per hidden neuron; +inf allowed
  double theta_u = 10.0;
  double sample_time_ms = 1.0;
  double tau_s_ms = 1.0;
  double tau_r_ms = 1.0;
  SurrogateConfig surrogate = SurrogateConfig::default_for_threshold(10.0);
  // Expected presynaptic spikes per neuron per step; sets the uniform weight
  // init range [-c, c], c = theta_u / (init_rate * fan_in).
  double init_rate = 0.02;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t input_channels() const { return layer_sizes.front(); }
  std::size_t class_count() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }
  // Delays are parameters only when enabled with a nonzero cap; a zero cap
  // clamps every delay to zero, which is the delay-free baseline.
  bool delays_effective() const { return delays_enabled && theta_d_ms > 0.0; }
  std::size_t weight_param_count() const;
  std::size_t delay_param_count() const;
};

struct Network {
  NetworkSpec spec;
  KernelTable response;
  KernelTable refractory;
  std::vector<SrmLayerParams> layers;
};

// Hidden layers carry per-neuron output delays (init 0); the output layer has
// none. Weights are uniform in [-c, c] drawn from spec.seed.
Network build_network(const NetworkSpec& spec);

struct LayerTrace {
  LayerForwardRecord record;
  SpikeRaster shifted;  // record.spikes after the axonal delay; equal when none
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  const SpikeRaster& output() const { return layers.back().shifted; }
};

ForwardTrace network_forward(const Network& net, const SpikeRaster& input);

// Forward pass keeping only the output raster.
SpikeRaster network_output(const Network& net, const SpikeRaster& input);

struct NetworkGradients {
  std::vector<Grid> weights;                // one per layer
  std::vector<std::vector<double>> delays;  // empty for layers without delay

  void accumulate(const NetworkGradients& other);
  void scale(double factor);
};

NetworkGradients zero_gradients(const Network& net);

// Reverse pass from dL/d(output spikes) down to every weight matrix and the
// spike-difference delay estimator of every delayed layer. Input gradients of
// the first layer are never materialized.
NetworkGradients network_backward(const Network& net, const ForwardTrace& trace,
                                  const Grid& upstream_grad, RefractoryBackward mode);

struct Dataset {
  std::vector<SpikeRaster> samples;
  std::vector<std::uint16_t> labels;

  std::size_t size() const { return samples.size(); }
};

Dataset rasterize_all(const std::vector<EventStream>& streams, double sample_time_ms,
                      bool split_polarity);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 8;  // gradient averaging within each batch
  OptimizerConfig optimizer;
  TargetSpec target;
  // Detached is the training default: backpropagating through the refractory
  // feedback multiplies |nu| * surrogate-slope (~7x here) per step and the
  // recursion overflows on hard spike trains. Exact mode stays available for
  // the smoothed verification graph, where the sigmoid slope keeps it stable.
  RefractoryBackward refractory_mode = RefractoryBackward::kDetached;
  // Sign applied to the spike-difference delay estimator before the optimizer
  // update. The estimator as printed points up the loss surface (delaying a
  // train past a rewarded step raises the estimate while the loss falls), so
  // descent needs the flip.
  double delay_update_direction = -1.0;

  void validate() const;
};

struct EpochRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = std::numeric_limits<double>::quiet_NaN();
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct DelayStats {
  std::size_t layer = 0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double mean_ms = 0.0;
  std::size_t at_floor = 0;  // clamped at 0
  std::size_t at_cap = 0;    // clamped at theta_d
  std::vector<std::size_t> histogram;  // 8 bins over [0, cap]
};

struct TrainReport {
  std::vector<EpochRow> epochs;
  std::vector<std::vector<DelayStats>> delay_history;  // per epoch, per delayed layer
  std::size_t weight_params = 0;
  std::size_t delay_params = 0;
  double wall_clock_seconds = 0.0;
};

struct Evaluation {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  Grid confusion;  // rows true label, cols prediction
  std::size_t no_spike_count = 0;  // samples classified with an all-silent output
};

// One seeded-shuffled pass; per-batch averaged gradients, one optimizer step
// per batch, delays re-clamped after every step. Train metrics are measured on
// the fly (pre-update forward of each sample).
EpochRow train_epoch(Network& net, Optimizer& opt, const Dataset& train,
                     const TrainConfig& config, std::mt19937_64& shuffle_rng);

Evaluation evaluate(const Network& net, const Dataset& data, const TargetSpec& target);

// Full loop: epochs x (train_epoch, evaluate on test when provided).
TrainReport run_training(Network& net, Optimizer& opt, const Dataset& train,
                         const Dataset& test, const TrainConfig& config);

std::vector<DelayStats> delay_stats(const Network& net);

struct CumulativeTrace {
  Grid counts;  // [classes x steps], running spike totals
  double sample_time_ms = 1.0;
  // Earliest time after which the running argmax never changes; 0 when the
  // output is silent throughout.
  double decision_time_ms = 0.0;
};

CumulativeTrace cumulative_trace(const Network& net, const SpikeRaster& sample);

// Same computation from an already-evaluated output raster.
CumulativeTrace cumulative_from_output(const SpikeRaster& output);

}  // namespace radsnn
