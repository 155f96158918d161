#pragma once

#include "radsnn/grid.hpp"
#include "radsnn/kernels.hpp"
#include "radsnn/rad_delay.hpp"
#include "radsnn/surrogate.hpp"

namespace radsnn {

// Parameters of one fully-connected layer: weight matrix plus the per-neuron
// axonal delay state applied to its output train (hidden layers only).
struct SrmLayerParams {
  Grid weights;  // [out_neurons x in_neurons]
  DelayState delay;
  bool has_delay = false;

  std::size_t out_neurons() const { return weights.rows(); }
  std::size_t in_neurons() const { return weights.cols(); }
};

// Everything the backward pass needs from one forward evaluation.
struct LayerForwardRecord {
  Grid response;     // kernel-filtered input [in x steps]
  Grid psp;          // weights * response [out x steps]
  Grid membrane;     // psp + refractory feedback [out x steps]
  SpikeRaster spikes;  // thresholded output, before any delay shift
  Grid activations;  // real-valued output: 0/1 in hard mode, sigmoid in smooth mode
};

// Output nonlinearity. Hard mode emits binary spikes (threshold crossing,
// with membrane == theta_u counting as a spike). Smooth mode replaces the step
// with a logistic sigmoid of the given sharpness; used for gradient
// verification only.
struct SpikeFunction {
  enum class Kind { kHard, kSmoothSigmoid };
  Kind kind = Kind::kHard;
  double sharpness = 1.0;

  static SpikeFunction hard() { return {Kind::kHard, 0.0}; }
  static SpikeFunction smooth(double sharpness) { return {Kind::kSmoothSigmoid, sharpness}; }
};

// Sequential membrane update over time: psp from the kernel-filtered input,
// plus the refractory kernel convolved with the neuron's own past output.
LayerForwardRecord layer_forward(const SpikeRaster& input, const SrmLayerParams& params,
                                 const KernelTable& response, const KernelTable& refractory,
                                 double theta_u);

// Same dynamics on real-valued activations (smooth verification mode).
LayerForwardRecord layer_forward_real(const Grid& input, const SrmLayerParams& params,
                                      const KernelTable& response,
                                      const KernelTable& refractory, double theta_u,
                                      SpikeFunction fn);

enum class RefractoryBackward {
  kExact,     // propagate backward in time through the refractory feedback
  kDetached,  // treat the refractory contribution as constant
};

struct LayerBackwardResult {
  Grid grad_weights;  // [out x in]
  Grid grad_input;    // dL/d(input activations) [in x steps]; empty if not requested
};

// Reverse-mode pass for the hard (production) forward: the spike derivative is
// the configured surrogate evaluated at the recorded membrane.
LayerBackwardResult layer_backward(const LayerForwardRecord& record,
                                   const Grid& upstream_grad_output,
                                   const SrmLayerParams& params, const KernelTable& response,
                                   const KernelTable& refractory, double theta_u,
                                   const SurrogateConfig& surrogate, RefractoryBackward mode,
                                   bool want_grad_input);

// Reverse-mode pass for the smooth forward: uses the true sigmoid derivative,
// so it is the exact gradient of the smooth graph (with kExact).
LayerBackwardResult layer_backward_real(const LayerForwardRecord& record,
                                        const Grid& upstream_grad_output,
                                        const SrmLayerParams& params,
                                        const KernelTable& response,
                                        const KernelTable& refractory, double theta_u,
                                        SpikeFunction fn, RefractoryBackward mode,
                                        bool want_grad_input);

}  // namespace radsnn
