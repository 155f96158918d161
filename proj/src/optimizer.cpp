#include "radsnn/optimizer.hpp"

#include <cmath>

#include "radsnn/checks.hpp"

namespace radsnn {

void OptimizerConfig::validate() const {
  RAD_CHECK(learning_rate_weights > 0, "weight learning rate must be positive");
  RAD_CHECK(learning_rate_delays > 0, "delay learning rate must be positive");
  RAD_CHECK(beta1 > 0 && beta1 < 1, "beta1 must lie in (0, 1)");
  RAD_CHECK(beta2 > 0 && beta2 < 1, "beta2 must lie in (0, 1)");
  RAD_CHECK(epsilon > 0, "epsilon must be positive");
}

std::string to_string(OptimizerConfig::Rule rule) {
  return rule == OptimizerConfig::Rule::kSgd ? "sgd" : "adam";
}

OptimizerConfig::Rule rule_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerConfig::Rule::kSgd;
  if (name == "adam") return OptimizerConfig::Rule::kAdam;
  throw Error("unknown optimizer rule '" + name + "' (expected sgd or adam)");
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::apply(std::size_t slot, double learning_rate, std::span<double> params,
                      std::span<const double> grads) {
  RAD_CHECK(params.size() == grads.size(), "parameter/gradient size mismatch in slot ", slot);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    RAD_CHECK(std::isfinite(grads[i]), "non-finite gradient ", grads[i], " in slot ", slot,
              " at index ", i, "; step rejected");
  }
  if (config_.rule == OptimizerConfig::Rule::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grads[i];
    return;
  }
  if (slots_.size() <= slot) slots_.resize(slot + 1);
  MomentState& state = slots_[slot];
  if (state.first.empty()) {
    state.first.assign(params.size(), 0.0);
    state.second.assign(params.size(), 0.0);
  }
  RAD_CHECK(state.first.size() == params.size(), "slot ", slot,
            " was previously used with a different parameter count");
  state.steps += 1;
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(state.steps));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(state.steps));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first[i];
    double& v = state.second[i];
    m = config_.beta1 * m + (1.0 - config_.beta1) * grads[i];
    v = config_.beta2 * v + (1.0 - config_.beta2) * grads[i] * grads[i];
    const double m_hat = m / bias1;
    const double v_hat = v / bias2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

}  // namespace radsnn
