#include "radsnn/loss.hpp"

#include <cmath>

#include "radsnn/checks.hpp"

namespace radsnn {

void TargetSpec::validate() const {
  RAD_CHECK(window_steps > 0, "target window must be nonempty");
  RAD_CHECK(true_class_count > 0, "true-class spike target must be positive");
  RAD_CHECK(false_class_count >= 0, "false-class spike target must be non-negative");
  RAD_CHECK(true_class_count > false_class_count,
            "true-class target must exceed false-class target");
}

TargetSpec TargetSpec::for_window(std::size_t steps) const {
  validate();
  RAD_CHECK(steps > 0, "target window must be nonempty");
  if (steps == window_steps) return *this;
  const double ratio = static_cast<double>(steps) / static_cast<double>(window_steps);
  TargetSpec scaled;
  scaled.window_steps = steps;
  scaled.false_class_count = std::round(false_class_count * ratio);
  scaled.true_class_count =
      std::max(std::round(true_class_count * ratio), scaled.false_class_count + 1.0);
  return scaled;
}

double count_loss(const SpikeRaster& output, const TargetSpec& target, std::size_t label) {
  RAD_CHECK(label < output.neurons, "label ", label, " out of range for ", output.neurons,
            " output neurons");
  double loss = 0.0;
  for (std::size_t i = 0; i < output.neurons; ++i) {
    const double diff =
        target.target_for(i, label) - static_cast<double>(output.row_spikes(i));
    loss += diff * diff;
  }
  return loss;
}

Grid count_loss_gradient(const SpikeRaster& output, const TargetSpec& target,
                         std::size_t label) {
  RAD_CHECK(label < output.neurons, "label ", label, " out of range for ", output.neurons,
            " output neurons");
  Grid grad(output.neurons, output.steps);
  for (std::size_t i = 0; i < output.neurons; ++i) {
    const double diff =
        target.target_for(i, label) - static_cast<double>(output.row_spikes(i));
    double* g = grad.row(i);
    for (std::size_t n = 0; n < output.steps; ++n) g[n] = -2.0 * diff;
  }
  return grad;
}

std::size_t classify(const SpikeRaster& output) {
  RAD_CHECK(output.neurons > 0, "cannot classify an empty raster");
  std::size_t best = 0;
  std::size_t best_count = output.row_spikes(0);
  for (std::size_t i = 1; i < output.neurons; ++i) {
    const std::size_t count = output.row_spikes(i);
    if (count > best_count) {
      best = i;
      best_count = count;
    }
  }
  return best;
}

}  // namespace radsnn
