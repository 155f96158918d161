#include "radsnn/kernels.hpp"

#include <cmath>
#include <limits>

namespace radsnn {

double eval_response(double t_ms, double tau_s) {
  RAD_CHECK(tau_s > 0.0, "tau_s must be positive");
  if (t_ms < 0.0) return 0.0;
  const double x = t_ms / tau_s;
  return x * std::exp(1.0 - x);
}

double eval_refractory(double t_ms, double tau_r, double theta_u) {
  RAD_CHECK(tau_r > 0.0, "tau_r must be positive");
  RAD_CHECK(theta_u > 0.0, "theta_u must be positive");
  if (t_ms < 0.0) return 0.0;
  const double x = t_ms / tau_r;
  return -2.0 * theta_u * x * std::exp(1.0 - x);
}

namespace {

constexpr double kSupportCutoff = 1e-6;  // relative to peak magnitude

double kernel_value(KernelKind kind, double t, double tau, double theta_u) {
  return kind == KernelKind::kResponse ? eval_response(t, tau)
                                       : eval_refractory(t, tau, theta_u);
}

// Both kernels share the shape x*exp(1-x) with peak magnitude at x == 1, so
// the relative tail test is independent of theta_u.
bool tail_below_cutoff(double t, double tau) {
  if (t <= tau) return false;  // still on or before the peak
  const double x = t / tau;
  return x * std::exp(1.0 - x) < kSupportCutoff;
}

}  // namespace

std::size_t required_support_steps(KernelKind /*kind*/, double tau, double sample_time_ms) {
  RAD_CHECK(tau > 0.0, "tau must be positive");
  RAD_CHECK(sample_time_ms > 0.0, "sample_time_ms must be positive");
  std::size_t n = 1;
  while (!tail_below_cutoff(static_cast<double>(n) * sample_time_ms, tau)) {
    ++n;
    RAD_CHECK(n < 1u << 24, "kernel support does not converge");
  }
  return n;
}

KernelTable tabulate(KernelKind kind, double tau, double theta_u, double sample_time_ms,
                     std::size_t support_steps) {
  RAD_CHECK(support_steps > 0, "support_steps must be positive");
  const double t_end = static_cast<double>(support_steps) * sample_time_ms;
  RAD_CHECK(tail_below_cutoff(t_end, tau),
            "kernel support window too short for the requested time constant");
  KernelTable table;
  table.kind = kind;
  table.sample_time_ms = sample_time_ms;
  table.samples.resize(support_steps);
  for (std::size_t n = 0; n < support_steps; ++n) {
    table.samples[n] = kernel_value(kind, static_cast<double>(n) * sample_time_ms, tau, theta_u);
  }
  return table;
}

KernelTable tabulate(KernelKind kind, double tau, double theta_u, double sample_time_ms) {
  return tabulate(kind, tau, theta_u, sample_time_ms,
                  required_support_steps(kind, tau, sample_time_ms));
}

Grid causal_convolve(const SpikeRaster& raster, const KernelTable& table) {
  Grid out(raster.neurons, raster.steps);
  const std::size_t support = table.support_steps();
  for (std::size_t i = 0; i < raster.neurons; ++i) {
    const std::uint8_t* in = raster.row(i);
    double* dst = out.row(i);
    for (std::size_t m = 0; m < raster.steps; ++m) {
      if (!in[m]) continue;
      const std::size_t end = std::min(raster.steps - m, support);
      for (std::size_t k = 0; k < end; ++k) dst[m + k] += table.samples[k];
    }
  }
  return out;
}

Grid causal_convolve(const Grid& signal, const KernelTable& table) {
  Grid out(signal.rows(), signal.cols());
  const std::size_t support = table.support_steps();
  const std::size_t steps = signal.cols();
  for (std::size_t i = 0; i < signal.rows(); ++i) {
    const double* in = signal.row(i);
    double* dst = out.row(i);
    for (std::size_t m = 0; m < steps; ++m) {
      const double v = in[m];
      if (v == 0.0) continue;
      const std::size_t end = std::min(steps - m, support);
      for (std::size_t k = 0; k < end; ++k) dst[m + k] += v * table.samples[k];
    }
  }
  return out;
}

Grid causal_correlate(const Grid& signal, const KernelTable& table) {
  Grid out(signal.rows(), signal.cols());
  const std::size_t support = table.support_steps();
  const std::size_t steps = signal.cols();
  for (std::size_t i = 0; i < signal.rows(); ++i) {
    const double* in = signal.row(i);
    double* dst = out.row(i);
    for (std::size_t m = 0; m < steps; ++m) {
      const std::size_t end = std::min(steps - m, support);
      double acc = 0.0;
      for (std::size_t k = 0; k < end; ++k) acc += in[m + k] * table.samples[k];
      dst[m] = acc;
    }
  }
  return out;
}

}  // namespace radsnn
