#pragma once

#include <cstddef>
#include <vector>

#include "radsnn/grid.hpp"

namespace radsnn {

enum class KernelKind { kResponse, kRefractory };

// Spike response kernel: (t/tau_s) * exp(1 - t/tau_s) for t >= 0, else 0.
// Peaks at exactly 1.0 when t == tau_s.
double eval_response(double t_ms, double tau_s);

// Refractory kernel: -2*theta_u * (t/tau_r) * exp(1 - t/tau_r) for t >= 0,
// else 0. Minimum value is -2*theta_u at t == tau_r.
double eval_refractory(double t_ms, double tau_r, double theta_u);

// Sampled kernel over a finite support window. samples[n] = kernel(n * Ts);
// entries past the window are treated as zero by the convolutions below.
struct KernelTable {
  KernelKind kind = KernelKind::kResponse;
  double sample_time_ms = 1.0;
  std::vector<double> samples;

  std::size_t support_steps() const { return samples.size(); }
};

// Smallest window length such that the first excluded sample has magnitude
// below 1e-6 of the kernel's peak (and lies past the peak).
std::size_t required_support_steps(KernelKind kind, double tau, double sample_time_ms);

// Sample a kernel on n = 0 .. support_steps-1. Throws if the support window is
// too short, i.e. |kernel(support_steps * Ts)| >= 1e-6 * peak magnitude.
KernelTable tabulate(KernelKind kind, double tau, double theta_u, double sample_time_ms,
                     std::size_t support_steps);

KernelTable tabulate(KernelKind kind, double tau, double theta_u, double sample_time_ms);

// Causal discrete convolution: out[i, n] = sum_{m <= n, n-m < support}
// in[i, m] * samples[n - m]. No future leakage.
Grid causal_convolve(const SpikeRaster& raster, const KernelTable& table);
Grid causal_convolve(const Grid& signal, const KernelTable& table);

// Adjoint of causal_convolve (correlation): out[i, m] = sum_{n >= m, n-m <
// support} in[i, n] * samples[n - m]. Used by the backward passes.
Grid causal_correlate(const Grid& signal, const KernelTable& table);

}  // namespace radsnn
