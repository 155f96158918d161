#pragma once

#include <cstddef>

#include "radsnn/grid.hpp"

namespace radsnn {

// Desired output spike counts: the labelled neuron should emit
// true_class_count spikes over the window, every other neuron
// false_class_count. Counts are stated for a reference window of
// window_steps samples and scale proportionally to other lengths.
struct TargetSpec {
  double true_class_count = 60.0;
  double false_class_count = 10.0;
  std::size_t window_steps = 300;

  void validate() const;

  // Proportionally rescaled copy for a window of `steps` samples, rounded to
  // whole spikes (keeping true > false).
  TargetSpec for_window(std::size_t steps) const;

  double target_for(std::size_t neuron, std::size_t label) const {
    return neuron == label ? true_class_count : false_class_count;
  }
};

// Squared error between desired and actual per-neuron spike counts,
// summed over output neurons.
double count_loss(const SpikeRaster& output, const TargetSpec& target, std::size_t label);

// dL/d(output[i, n]). The count is a plain sum over time, so the gradient is
// constant along the time axis: -2 * (target_i - actual_i) at every step.
Grid count_loss_gradient(const SpikeRaster& output, const TargetSpec& target,
                         std::size_t label);

// Argmax of total spike count per neuron; ties resolve to the lowest index.
std::size_t classify(const SpikeRaster& output);

}  // namespace radsnn
