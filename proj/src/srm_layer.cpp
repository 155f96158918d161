#include "radsnn/srm_layer.hpp"

#include <cmath>

namespace radsnn {

namespace {

Grid weighted_response(const Grid& weights, const Grid& response) {
  const std::size_t out_n = weights.rows();
  const std::size_t in_n = weights.cols();
  const std::size_t steps = response.cols();
  RAD_CHECK(response.rows() == in_n, "input raster width does not match layer weights");
  Grid psp(out_n, steps);
  for (std::size_t i = 0; i < out_n; ++i) {
    double* dst = psp.row(i);
    const double* w = weights.row(i);
    for (std::size_t j = 0; j < in_n; ++j) {
      const double wij = w[j];
      if (wij == 0.0) continue;
      const double* r = response.row(j);
      for (std::size_t n = 0; n < steps; ++n) dst[n] += wij * r[n];
    }
  }
  return psp;
}

double smooth_activation(double u, double theta_u, double sharpness) {
  return 1.0 / (1.0 + std::exp(-sharpness * (u - theta_u)));
}

// Shared sequential dynamics. Activation at step n feeds the refractory sum of
// later steps; refractory[0] is 0 by the kernel shape, so the update order per
// step is immaterial.
LayerForwardRecord run_forward(Grid response, const SrmLayerParams& params,
                               const KernelTable& refractory, double theta_u,
                               SpikeFunction fn, double sample_time_ms) {
  LayerForwardRecord rec;
  rec.response = std::move(response);
  rec.psp = weighted_response(params.weights, rec.response);
  const std::size_t out_n = rec.psp.rows();
  const std::size_t steps = rec.psp.cols();
  rec.membrane = rec.psp;
  rec.activations = Grid(out_n, steps);
  rec.spikes = SpikeRaster(out_n, steps, sample_time_ms);
  const std::size_t support = refractory.support_steps();
  for (std::size_t i = 0; i < out_n; ++i) {
    double* u = rec.membrane.row(i);
    double* a = rec.activations.row(i);
    std::uint8_t* s = rec.spikes.row(i);
    for (std::size_t n = 0; n < steps; ++n) {
      double out;
      if (fn.kind == SpikeFunction::Kind::kHard) {
        const bool fired = u[n] >= theta_u;
        s[n] = fired ? 1 : 0;
        out = fired ? 1.0 : 0.0;
      } else {
        out = smooth_activation(u[n], theta_u, fn.sharpness);
        s[n] = out >= 0.5 ? 1 : 0;
      }
      a[n] = out;
      if (out != 0.0) {
        const std::size_t end = std::min(steps - n, support);
        for (std::size_t k = 1; k < end; ++k) u[n + k] += out * refractory.samples[k];
      }
    }
  }
  return rec;
}

template <typename SpikeDerivative>
LayerBackwardResult run_backward(const LayerForwardRecord& record,
                                 const Grid& upstream_grad_output,
                                 const SrmLayerParams& params, const KernelTable& response,
                                 const KernelTable& refractory, SpikeDerivative derivative,
                                 RefractoryBackward mode, bool want_grad_input) {
  const std::size_t out_n = params.out_neurons();
  const std::size_t in_n = params.in_neurons();
  const std::size_t steps = record.membrane.cols();
  RAD_CHECK(upstream_grad_output.rows() == out_n && upstream_grad_output.cols() == steps,
            "upstream gradient shape mismatch");
  RAD_CHECK(record.response.rows() == in_n, "forward record does not match layer weights");

  // dL/d(membrane). With the exact mode, the own-spike refractory feedback is
  // unrolled backward in time: dL/da[n] collects the upstream term plus the
  // influence of a[n] on all later membranes through the refractory kernel.
  Grid grad_membrane(out_n, steps);
  const std::size_t support = refractory.support_steps();
  for (std::size_t i = 0; i < out_n; ++i) {
    const double* up = upstream_grad_output.row(i);
    const double* u = record.membrane.row(i);
    double* gm = grad_membrane.row(i);
    if (mode == RefractoryBackward::kDetached) {
      for (std::size_t n = 0; n < steps; ++n) gm[n] = up[n] * derivative(i, n, u[n]);
    } else {
      for (std::size_t n = steps; n-- > 0;) {
        double ga = up[n];
        const std::size_t end = std::min(steps - n, support);
        for (std::size_t k = 1; k < end; ++k) ga += gm[n + k] * refractory.samples[k];
        gm[n] = ga * derivative(i, n, u[n]);
      }
    }
  }

  LayerBackwardResult result;
  result.grad_weights = Grid(out_n, in_n);
  for (std::size_t i = 0; i < out_n; ++i) {
    const double* gm = grad_membrane.row(i);
    double* gw = result.grad_weights.row(i);
    for (std::size_t j = 0; j < in_n; ++j) {
      const double* r = record.response.row(j);
      double acc = 0.0;
      for (std::size_t n = 0; n < steps; ++n) acc += gm[n] * r[n];
      gw[j] = acc;
    }
  }

  if (want_grad_input) {
    // dL/d(response) = W^T * grad_membrane, then the convolution adjoint.
    Grid grad_response(in_n, steps);
    for (std::size_t i = 0; i < out_n; ++i) {
      const double* gm = grad_membrane.row(i);
      const double* w = params.weights.row(i);
      for (std::size_t j = 0; j < in_n; ++j) {
        const double wij = w[j];
        if (wij == 0.0) continue;
        double* gr = grad_response.row(j);
        for (std::size_t n = 0; n < steps; ++n) gr[n] += wij * gm[n];
      }
    }
    result.grad_input = causal_correlate(grad_response, response);
  }
  return result;
}

}  // namespace

LayerForwardRecord layer_forward(const SpikeRaster& input, const SrmLayerParams& params,
                                 const KernelTable& response, const KernelTable& refractory,
                                 double theta_u) {
  RAD_CHECK(input.neurons == params.in_neurons(),
            "input raster channel count does not match layer weights");
  return run_forward(causal_convolve(input, response), params, refractory, theta_u,
                     SpikeFunction::hard(), input.sample_time_ms);
}

LayerForwardRecord layer_forward_real(const Grid& input, const SrmLayerParams& params,
                                      const KernelTable& response,
                                      const KernelTable& refractory, double theta_u,
                                      SpikeFunction fn) {
  RAD_CHECK(input.rows() == params.in_neurons(),
            "input signal channel count does not match layer weights");
  return run_forward(causal_convolve(input, response), params, refractory, theta_u, fn,
                     response.sample_time_ms);
}

LayerBackwardResult layer_backward(const LayerForwardRecord& record,
                                   const Grid& upstream_grad_output,
                                   const SrmLayerParams& params, const KernelTable& response,
                                   const KernelTable& refractory, double theta_u,
                                   const SurrogateConfig& surrogate, RefractoryBackward mode,
                                   bool want_grad_input) {
  auto derivative = [&](std::size_t, std::size_t, double u) {
    return surrogate_derivative(u, theta_u, surrogate);
  };
  return run_backward(record, upstream_grad_output, params, response, refractory, derivative,
                      mode, want_grad_input);
}

LayerBackwardResult layer_backward_real(const LayerForwardRecord& record,
                                        const Grid& upstream_grad_output,
                                        const SrmLayerParams& params,
                                        const KernelTable& response,
                                        const KernelTable& refractory,
                                        [[maybe_unused]] double theta_u, SpikeFunction fn,
                                        RefractoryBackward mode, bool want_grad_input) {
  RAD_CHECK(fn.kind == SpikeFunction::Kind::kSmoothSigmoid,
            "smooth backward needs a smooth forward record");
  auto derivative = [&](std::size_t i, std::size_t n, double) {
    const double a = record.activations.at(i, n);
    return fn.sharpness * a * (1.0 - a);
  };
  return run_backward(record, upstream_grad_output, params, response, refractory, derivative,
                      mode, want_grad_input);
}

}  // namespace radsnn
