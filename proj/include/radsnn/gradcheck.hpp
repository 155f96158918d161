#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radsnn/network.hpp"

namespace radsnn {

double relative_error(double a, double b);

// Central difference of a scalar function; used to validate the checker
// itself on closed-form cases before trusting it on networks.
template <typename F>
double central_difference(F&& f, double x, double h) {
  RAD_CHECK(h > 0, "fd step must be positive");
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// The smoothed relaxation of the production network: the hard threshold is
// replaced by a logistic sigmoid of the given sharpness and the delay shift by
// fractional linear interpolation, so the loss is differentiable in every
// weight and delay. Exists for verification only.
struct SmoothedTrace {
  std::vector<LayerForwardRecord> records;
  std::vector<Grid> shifted;  // post-delay activations per layer
  double loss = 0.0;
};

SmoothedTrace smoothed_forward(const Network& net, const SpikeRaster& sample,
                               std::size_t label, const TargetSpec& target,
                               double sharpness);

double smoothed_loss(const Network& net, const SpikeRaster& sample, std::size_t label,
                     const TargetSpec& target, double sharpness);

struct SmoothedGradients {
  std::vector<Grid> weights;
  // d(loss)/d(raw delay): exact interpolation derivative chained through the
  // clamp (zero outside [0, theta_d]).
  std::vector<std::vector<double>> delays;
  // The production spike-difference estimator evaluated on the same smoothed
  // signals (w.r.t. the clamped delay); kept for sign comparisons.
  std::vector<std::vector<double>> delay_estimator;
};

// Exact reverse-mode gradient of the smoothed graph.
SmoothedGradients smoothed_gradients(const Network& net, const SpikeRaster& sample,
                                     std::size_t label, const TargetSpec& target,
                                     double sharpness);

// Central finite differences over every weight and raw delay of the smoothed
// graph. delay_estimator is left empty.
SmoothedGradients fd_gradient(const Network& net, const SpikeRaster& sample,
                              std::size_t label, const TargetSpec& target, double sharpness,
                              double h);

struct GradCheckEntry {
  std::string name;
  double analytic = 0.0;
  double fd = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double h = 0.0;
  double sharpness = 0.0;
  double tolerance = 0.0;
  std::vector<GradCheckEntry> weights;
  std::vector<GradCheckEntry> delays;
  double max_rel_error_weights = 0.0;
  std::string worst_weight;
  bool pass = false;  // gates on weights; delays are covered by sign agreement
};

GradCheckReport grad_check(const Network& net, const SpikeRaster& sample, std::size_t label,
                           const TargetSpec& target, double sharpness, double h,
                           double tolerance);

// Literal evaluation of the delay-gradient double sum
//   Ts * sum_n sum_{m<=n} [(s[i,m] - s[i,m-1]) / Ts] * per_step[i](n, m)
// with no algebraic simplification. per_step_loss_grads[i](n, m) holds the
// loss-at-instance-n sensitivity to the shifted train at step m.
std::vector<double> eq_bruteforce_delay_gradient(const SpikeRaster& shifted,
                                                 const std::vector<Grid>& per_step_loss_grads,
                                                 double sample_time_ms);

struct SignAgreementResult {
  std::size_t checked = 0;          // delay parameters with a usable gradient
  std::size_t analytic_agree = 0;   // exact smoothed gradient vs fd
  std::size_t estimator_agree = 0;  // spike-difference estimator vs fd

  double analytic_fraction() const {
    return checked ? static_cast<double>(analytic_agree) / checked : 0.0;
  }
  double estimator_fraction() const {
    return checked ? static_cast<double>(estimator_agree) / checked : 0.0;
  }
};

// Random small networks with interior delays; compares delay gradient signs
// against finite differences. Documents that the estimator as printed points
// against the descent direction (its agreement is the complement of the
// analytic one).
SignAgreementResult sign_agreement_study(std::uint64_t seed, std::size_t configs);

}  // namespace radsnn
