#include "radsnn/rad_delay.hpp"

#include <cmath>

namespace radsnn {

double clamp_delay(double d, double theta_d) {
  RAD_CHECK(theta_d >= 0.0, "theta_d must be non-negative");
  if (d < 0.0) return 0.0;
  if (d > theta_d) return theta_d;
  return d;
}

DelayState DelayState::zeros(std::size_t neurons, double theta_d) {
  RAD_CHECK(theta_d >= 0.0, "theta_d must be non-negative");
  DelayState state;
  state.raw.assign(neurons, 0.0);
  state.clamped.assign(neurons, 0.0);
  state.theta_d = theta_d;
  return state;
}

void DelayState::reclamp() {
  clamped.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) clamped[i] = clamp_delay(raw[i], theta_d);
}

SpikeRaster shift_spikes(const SpikeRaster& spikes, const DelayState& state) {
  RAD_CHECK(spikes.neurons == state.size(), "raster/delay size mismatch");
  SpikeRaster out(spikes.neurons, spikes.steps, spikes.sample_time_ms);
  for (std::size_t i = 0; i < spikes.neurons; ++i) {
    const auto shift = static_cast<std::size_t>(
        std::llround(state.clamped[i] / spikes.sample_time_ms));
    if (shift >= spikes.steps) continue;  // everything falls off the window
    const std::uint8_t* src = spikes.row(i);
    std::uint8_t* dst = out.row(i);
    for (std::size_t n = shift; n < spikes.steps; ++n) dst[n] = src[n - shift];
  }
  return out;
}

std::vector<double> delay_gradient(const SpikeRaster& shifted, const Grid& upstream_grad,
                                   double sample_time_ms) {
  RAD_CHECK(shifted.neurons == upstream_grad.rows() && shifted.steps == upstream_grad.cols(),
            "raster/gradient shape mismatch");
  RAD_CHECK(sample_time_ms > 0.0, "sample_time_ms must be positive");
  std::vector<double> grad(shifted.neurons, 0.0);
  for (std::size_t i = 0; i < shifted.neurons; ++i) {
    const std::uint8_t* s = shifted.row(i);
    const double* up = upstream_grad.row(i);
    double acc = 0.0;
    for (std::size_t m = 0; m < shifted.steps; ++m) {
      const double prev = m == 0 ? 0.0 : static_cast<double>(s[m - 1]);
      const double diff = (static_cast<double>(s[m]) - prev) / sample_time_ms;
      acc += diff * up[m];
    }
    grad[i] = acc * sample_time_ms;
  }
  return grad;
}

Grid unshift_gradient(const Grid& upstream_grad, const DelayState& state,
                      double sample_time_ms) {
  RAD_CHECK(upstream_grad.rows() == state.size(), "gradient/delay size mismatch");
  const std::size_t steps = upstream_grad.cols();
  Grid out(upstream_grad.rows(), steps);
  for (std::size_t i = 0; i < upstream_grad.rows(); ++i) {
    const auto shift =
        static_cast<std::size_t>(std::llround(state.clamped[i] / sample_time_ms));
    if (shift >= steps) continue;
    const double* up = upstream_grad.row(i);
    double* dst = out.row(i);
    for (std::size_t n = 0; n + shift < steps; ++n) dst[n] = up[n + shift];
  }
  return out;
}

DelayState apply_delay_update(DelayState state, const std::vector<double>& grad,
                              double step_size) {
  RAD_CHECK(grad.size() == state.size(), "gradient/delay size mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i) state.raw[i] -= step_size * grad[i];
  state.reclamp();
  return state;
}

Grid shift_real(const Grid& signal, const DelayState& state, double sample_time_ms) {
  RAD_CHECK(signal.rows() == state.size(), "signal/delay size mismatch");
  const std::size_t steps = signal.cols();
  Grid out(signal.rows(), steps);
  for (std::size_t i = 0; i < signal.rows(); ++i) {
    const double shift = state.clamped[i] / sample_time_ms;
    const auto whole = static_cast<std::size_t>(std::floor(shift));
    const double frac = shift - std::floor(shift);
    const double* src = signal.row(i);
    double* dst = out.row(i);
    for (std::size_t n = 0; n < steps; ++n) {
      double v = 0.0;
      if (n >= whole) v += (1.0 - frac) * src[n - whole];
      if (n >= whole + 1) v += frac * src[n - whole - 1];
      dst[n] = v;
    }
  }
  return out;
}

ShiftRealBackward shift_real_backward(const Grid& signal, const DelayState& state,
                                      const Grid& upstream_grad, double sample_time_ms) {
  RAD_CHECK(signal.rows() == state.size(), "signal/delay size mismatch");
  RAD_CHECK(signal.rows() == upstream_grad.rows() && signal.cols() == upstream_grad.cols(),
            "signal/gradient shape mismatch");
  const std::size_t steps = signal.cols();
  ShiftRealBackward result;
  result.grad_input = Grid(signal.rows(), steps);
  result.grad_delay.assign(signal.rows(), 0.0);
  for (std::size_t i = 0; i < signal.rows(); ++i) {
    const double shift = state.clamped[i] / sample_time_ms;
    const auto whole = static_cast<std::size_t>(std::floor(shift));
    const double frac = shift - std::floor(shift);
    const double* src = signal.row(i);
    const double* up = upstream_grad.row(i);
    double* gin = result.grad_input.row(i);
    double acc = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      // out[n] = (1-f) * src[n-w] + f * src[n-w-1], so on the linear segment
      // d(out[n])/d(delay) = (src[n-w-1] - src[n-w]) / Ts.
      double slope = 0.0;
      if (n >= whole) {
        gin[n - whole] += (1.0 - frac) * up[n];
        slope -= src[n - whole];
      }
      if (n >= whole + 1) {
        gin[n - whole - 1] += frac * up[n];
        slope += src[n - whole - 1];
      }
      acc += slope * up[n];
    }
    result.grad_delay[i] = acc / sample_time_ms;
  }
  return result;
}

}  // namespace radsnn
