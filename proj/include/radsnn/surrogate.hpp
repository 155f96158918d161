#pragma once

#include <cmath>

#include "radsnn/checks.hpp"

namespace radsnn {

enum class SurrogateKind { kExponential, kFastSigmoid };

// Smooth stand-in for the spike nonlinearity's derivative in the backward
// pass. sharpness is in units of 1/potential; default_for_threshold picks
// 1/theta_u so the decay length equals one threshold.
struct SurrogateConfig {
  SurrogateKind kind = SurrogateKind::kExponential;
  double scale = 1.0;      // alpha
  double sharpness = 0.1;  // beta

  static SurrogateConfig default_for_threshold(double theta_u) {
    RAD_CHECK(theta_u > 0.0, "theta_u must be positive");
    return SurrogateConfig{SurrogateKind::kExponential, 1.0, 1.0 / theta_u};
  }
};

// Strictly positive, maximal at membrane == theta_u, symmetric about it.
inline double surrogate_derivative(double membrane_value, double theta_u,
                                   const SurrogateConfig& cfg) {
  RAD_CHECK(cfg.scale > 0.0 && cfg.sharpness > 0.0, "surrogate parameters must be positive");
  const double dist = std::abs(membrane_value - theta_u);
  switch (cfg.kind) {
    case SurrogateKind::kExponential:
      return (1.0 / cfg.scale) * std::exp(-cfg.sharpness * dist);
    case SurrogateKind::kFastSigmoid: {
      const double denom = 1.0 + cfg.sharpness * dist;
      return cfg.sharpness / (2.0 * denom * denom);
    }
  }
  return 0.0;
}

}  // namespace radsnn
