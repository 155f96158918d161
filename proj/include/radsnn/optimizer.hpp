#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radsnn {

struct OptimizerConfig {
  enum class Rule { kSgd, kAdam };

  Rule rule = Rule::kAdam;
  double learning_rate_weights = 0.01;
  // Delays move in milliseconds; their gradients are orders of magnitude
  // smaller than weight gradients, hence the 10x rate.
  double learning_rate_delays = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;  // drives the epoch shuffle order

  void validate() const;
};

std::string to_string(OptimizerConfig::Rule rule);
OptimizerConfig::Rule rule_from_string(const std::string& name);

// Adam accumulators for one parameter tensor; unused (empty) under sgd.
struct MomentState {
  std::vector<double> first;
  std::vector<double> second;
  std::uint64_t steps = 0;
};

// Stateful update rule shared by weights and delays. Each parameter tensor is
// identified by a slot index so its moments persist across steps; the caller
// supplies the learning rate (weights and delays use different ones).
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {});

  const OptimizerConfig& config() const { return config_; }

  // One descent update in place. Rejects non-finite gradients (throws before
  // touching params or moments).
  void apply(std::size_t slot, double learning_rate, std::span<double> params,
             std::span<const double> grads);

  std::vector<MomentState>& slots() { return slots_; }
  const std::vector<MomentState>& slots() const { return slots_; }

 private:
  OptimizerConfig config_;
  std::vector<MomentState> slots_;
};

}  // namespace radsnn
