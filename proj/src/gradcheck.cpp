#include "radsnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "radsnn/rad_delay.hpp"

namespace radsnn {

namespace {

// Printed spike-difference estimator applied to a real-valued shifted signal.
std::vector<double> estimator_on_real(const Grid& shifted, const Grid& upstream,
                                      double sample_time_ms) {
  std::vector<double> grad(shifted.rows(), 0.0);
  for (std::size_t i = 0; i < shifted.rows(); ++i) {
    const double* s = shifted.row(i);
    const double* up = upstream.row(i);
    double acc = 0.0;
    for (std::size_t m = 0; m < shifted.cols(); ++m) {
      const double prev = m == 0 ? 0.0 : s[m - 1];
      acc += ((s[m] - prev) / sample_time_ms) * up[m];
    }
    grad[i] = acc * sample_time_ms;
  }
  return grad;
}

double clamp_derivative(double raw, double theta_d) {
  return raw >= 0.0 && raw <= theta_d ? 1.0 : 0.0;
}

}  // namespace

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

SmoothedTrace smoothed_forward(const Network& net, const SpikeRaster& sample,
                               std::size_t label, const TargetSpec& target,
                               double sharpness) {
  RAD_CHECK(sharpness > 0, "sigmoid sharpness must be positive");
  RAD_CHECK(sample.neurons == net.spec.input_channels(), "input has ", sample.neurons,
            " channels, network expects ", net.spec.input_channels());
  const SpikeFunction fn = SpikeFunction::smooth(sharpness);
  SmoothedTrace trace;
  trace.records.reserve(net.layers.size());
  trace.shifted.reserve(net.layers.size());
  Grid current = sample.to_grid();
  for (const SrmLayerParams& layer : net.layers) {
    LayerForwardRecord rec = layer_forward_real(current, layer, net.response, net.refractory,
                                                net.spec.theta_u, fn);
    Grid out = layer.has_delay
                   ? shift_real(rec.activations, layer.delay, net.spec.sample_time_ms)
                   : rec.activations;
    trace.records.push_back(std::move(rec));
    trace.shifted.push_back(std::move(out));
    current = trace.shifted.back();
  }

  const Grid& out = trace.shifted.back();
  const TargetSpec scaled = target.for_window(out.cols());
  RAD_CHECK(label < out.rows(), "label out of range");
  double loss = 0.0;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double* a = out.row(i);
    double total = 0.0;
    for (std::size_t n = 0; n < out.cols(); ++n) total += a[n];
    const double diff = scaled.target_for(i, label) - total;
    loss += diff * diff;
  }
  trace.loss = loss;
  return trace;
}

double smoothed_loss(const Network& net, const SpikeRaster& sample, std::size_t label,
                     const TargetSpec& target, double sharpness) {
  return smoothed_forward(net, sample, label, target, sharpness).loss;
}

SmoothedGradients smoothed_gradients(const Network& net, const SpikeRaster& sample,
                                     std::size_t label, const TargetSpec& target,
                                     double sharpness) {
  const SmoothedTrace trace = smoothed_forward(net, sample, label, target, sharpness);
  const SpikeFunction fn = SpikeFunction::smooth(sharpness);
  const double ts = net.spec.sample_time_ms;

  SmoothedGradients grads;
  grads.weights.resize(net.layers.size());
  grads.delays.resize(net.layers.size());
  grads.delay_estimator.resize(net.layers.size());

  const Grid& out = trace.shifted.back();
  const TargetSpec scaled = target.for_window(out.cols());
  Grid g(out.rows(), out.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double* a = out.row(i);
    double total = 0.0;
    for (std::size_t n = 0; n < out.cols(); ++n) total += a[n];
    const double diff = scaled.target_for(i, label) - total;
    double* row = g.row(i);
    for (std::size_t n = 0; n < out.cols(); ++n) row[n] = -2.0 * diff;
  }

  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const SrmLayerParams& layer = net.layers[l];
    if (layer.has_delay) {
      grads.delay_estimator[l] = estimator_on_real(trace.shifted[l], g, ts);
      ShiftRealBackward srb =
          shift_real_backward(trace.records[l].activations, layer.delay, g, ts);
      grads.delays[l] = std::move(srb.grad_delay);
      for (std::size_t i = 0; i < grads.delays[l].size(); ++i) {
        grads.delays[l][i] *= clamp_derivative(layer.delay.raw[i], layer.delay.theta_d);
      }
      g = std::move(srb.grad_input);
    }
    const bool want_input = l > 0;
    LayerBackwardResult back =
        layer_backward_real(trace.records[l], g, layer, net.response, net.refractory,
                            net.spec.theta_u, fn, RefractoryBackward::kExact, want_input);
    grads.weights[l] = std::move(back.grad_weights);
    if (want_input) g = std::move(back.grad_input);
  }
  return grads;
}

SmoothedGradients fd_gradient(const Network& net, const SpikeRaster& sample,
                              std::size_t label, const TargetSpec& target, double sharpness,
                              double h) {
  RAD_CHECK(h > 0, "fd step must be positive");
  Network work = net;
  auto eval = [&] { return smoothed_loss(work, sample, label, target, sharpness); };

  SmoothedGradients grads;
  grads.weights.resize(net.layers.size());
  grads.delays.resize(net.layers.size());
  grads.delay_estimator.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    SrmLayerParams& layer = work.layers[l];
    grads.weights[l] = Grid(layer.out_neurons(), layer.in_neurons());
    for (std::size_t k = 0; k < layer.weights.data().size(); ++k) {
      double& w = layer.weights.data()[k];
      const double orig = w;
      w = orig + h;
      const double lp = eval();
      w = orig - h;
      const double lm = eval();
      w = orig;
      grads.weights[l].data()[k] = (lp - lm) / (2.0 * h);
    }
    if (!layer.has_delay) continue;
    grads.delays[l].assign(layer.delay.size(), 0.0);
    for (std::size_t i = 0; i < layer.delay.size(); ++i) {
      double& d = layer.delay.raw[i];
      const double orig = d;
      d = orig + h;
      layer.delay.reclamp();
      const double lp = eval();
      d = orig - h;
      layer.delay.reclamp();
      const double lm = eval();
      d = orig;
      layer.delay.reclamp();
      grads.delays[l][i] = (lp - lm) / (2.0 * h);
    }
  }
  return grads;
}

GradCheckReport grad_check(const Network& net, const SpikeRaster& sample, std::size_t label,
                           const TargetSpec& target, double sharpness, double h,
                           double tolerance) {
  GradCheckReport report;
  report.h = h;
  report.sharpness = sharpness;
  report.tolerance = tolerance;

  const SmoothedGradients analytic = smoothed_gradients(net, sample, label, target, sharpness);
  const SmoothedGradients fd = fd_gradient(net, sample, label, target, sharpness, h);

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Grid& a = analytic.weights[l];
    const Grid& f = fd.weights[l];
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) {
        GradCheckEntry e;
        e.name = "layer" + std::to_string(l) + ".weight[" + std::to_string(i) + "," +
                 std::to_string(j) + "]";
        e.analytic = a.at(i, j);
        e.fd = f.at(i, j);
        e.rel_error = relative_error(e.analytic, e.fd);
        report.weights.push_back(std::move(e));
      }
    }
    for (std::size_t i = 0; i < analytic.delays[l].size(); ++i) {
      GradCheckEntry e;
      e.name = "layer" + std::to_string(l) + ".delay[" + std::to_string(i) + "]";
      e.analytic = analytic.delays[l][i];
      e.fd = fd.delays[l][i];
      e.rel_error = relative_error(e.analytic, e.fd);
      report.delays.push_back(std::move(e));
    }
  }

  for (const GradCheckEntry& e : report.weights) {
    if (e.rel_error > report.max_rel_error_weights) {
      report.max_rel_error_weights = e.rel_error;
      report.worst_weight = e.name;
    }
  }
  report.pass = report.max_rel_error_weights <= tolerance;
  return report;
}

std::vector<double> eq_bruteforce_delay_gradient(const SpikeRaster& shifted,
                                                 const std::vector<Grid>& per_step_loss_grads,
                                                 double sample_time_ms) {
  RAD_CHECK(per_step_loss_grads.size() == shifted.neurons,
            "need one per-step grid per neuron");
  std::vector<double> grad(shifted.neurons, 0.0);
  for (std::size_t i = 0; i < shifted.neurons; ++i) {
    const Grid& per_step = per_step_loss_grads[i];
    RAD_CHECK(per_step.rows() == shifted.steps && per_step.cols() == shifted.steps,
              "per-step grid must be steps x steps");
    double acc = 0.0;
    for (std::size_t n = 0; n < shifted.steps; ++n) {
      for (std::size_t m = 0; m <= n; ++m) {
        const double prev = m == 0 ? 0.0 : static_cast<double>(shifted.get(i, m - 1));
        const double diff =
            (static_cast<double>(shifted.get(i, m)) - prev) / sample_time_ms;
        acc += diff * per_step.at(n, m);
      }
    }
    grad[i] = sample_time_ms * acc;
  }
  return grad;
}

SignAgreementResult sign_agreement_study(std::uint64_t seed, std::size_t configs) {
  std::mt19937_64 rng(seed);
  SignAgreementResult result;
  for (std::size_t c = 0; c < configs; ++c) {
    NetworkSpec spec;
    std::uniform_int_distribution<std::size_t> in_dist(3, 6), hid_dist(4, 8), out_dist(2, 4);
    spec.layer_sizes = {in_dist(rng), hid_dist(rng), out_dist(rng)};
    spec.theta_d_ms = 16.0;
    spec.seed = rng();
    spec.init_rate = 0.5;  // keep sigmoids responsive so finite differences resolve
    Network net = build_network(spec);

    // interior delays, away from the clamp corners
    std::uniform_real_distribution<double> delay_dist(1.0, spec.theta_d_ms - 1.0);
    for (SrmLayerParams& layer : net.layers) {
      if (!layer.has_delay) continue;
      for (double& d : layer.delay.raw) d = delay_dist(rng);
      layer.delay.reclamp();
    }

    const std::size_t steps = 48;
    SpikeRaster sample(spec.input_channels(), steps, spec.sample_time_ms);
    std::bernoulli_distribution fire(0.1);
    for (std::uint8_t& v : sample.data) v = fire(rng) ? 1 : 0;
    std::uniform_int_distribution<std::size_t> label_dist(0, spec.class_count() - 1);
    const std::size_t label = label_dist(rng);

    const TargetSpec target;
    const double sharpness = net.spec.surrogate.sharpness;
    const SmoothedGradients analytic =
        smoothed_gradients(net, sample, label, target, sharpness);
    const SmoothedGradients fd = fd_gradient(net, sample, label, target, sharpness, 1e-4);

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      for (std::size_t i = 0; i < analytic.delays[l].size(); ++i) {
        const double f = fd.delays[l][i];
        const double a = analytic.delays[l][i];
        const double est = analytic.delay_estimator[l][i];
        if (std::max({std::abs(f), std::abs(a), std::abs(est)}) < 1e-9) continue;
        ++result.checked;
        if (f * a > 0) ++result.analytic_agree;
        if (f * est > 0) ++result.estimator_agree;
      }
    }
  }
  return result;
}

}  // namespace radsnn
