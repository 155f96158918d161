#pragma once

#include <limits>
#include <vector>

#include "radsnn/grid.hpp"

namespace radsnn {

// Rectification clamp: 0 below zero, identity on [0, theta_d], theta_d above.
double clamp_delay(double d, double theta_d);

// Per-neuron axonal delay state. raw is what the optimizer owns; clamped is
// what the forward pass applies. clamped[i] == clamp_delay(raw[i], theta_d)
// holds at all times.
struct DelayState {
  std::vector<double> raw;
  std::vector<double> clamped;
  double theta_d = std::numeric_limits<double>::infinity();

  static DelayState zeros(std::size_t neurons, double theta_d);

  std::size_t size() const { return raw.size(); }
  void reclamp();

  friend bool operator==(const DelayState&, const DelayState&) = default;
};

// Shift each neuron's spike train later by round(clamped / Ts) bins. Spikes
// shifted past the end of the window are dropped. The continuous delay value
// is kept in the state; only the applied shift is rounded.
SpikeRaster shift_spikes(const SpikeRaster& spikes, const DelayState& state);

// Delay gradient from the spike-difference estimator:
//   grad[i] = Ts * sum_m [(s[i,m] - s[i,m-1]) / Ts] * upstream[i,m]
// with s[i,-1] = 0. `shifted` is the already-shifted train and `upstream`
// holds dL/d(shifted spikes) accumulated over all later time instances.
std::vector<double> delay_gradient(const SpikeRaster& shifted, const Grid& upstream_grad,
                                   double sample_time_ms);

// Adjoint of shift_spikes: routes dL/d(shifted train) back to the unshifted
// train. Entries shifted past the window receive zero gradient.
Grid unshift_gradient(const Grid& upstream_grad, const DelayState& state,
                      double sample_time_ms);

// Plain gradient-descent update of the raw delays followed by the clamp.
DelayState apply_delay_update(DelayState state, const std::vector<double>& grad,
                              double step_size);

// Fractional delay shift by linear interpolation, differentiable in the delay.
// Used by the smoothed verification mode, not by production training.
Grid shift_real(const Grid& signal, const DelayState& state, double sample_time_ms);

struct ShiftRealBackward {
  Grid grad_input;
  std::vector<double> grad_delay;
};

// Backward pass of shift_real: gradients w.r.t. the unshifted signal and the
// (clamped) delay values.
ShiftRealBackward shift_real_backward(const Grid& signal, const DelayState& state,
                                      const Grid& upstream_grad, double sample_time_ms);

}  // namespace radsnn
