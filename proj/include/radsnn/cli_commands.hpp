#pragma once

#include <string>

#include "radsnn/config.hpp"

namespace radsnn {

// CLI verbs. Each returns a process exit code: 0 success, 1 check or
// tolerance failure, 2 config error. All are deterministic given the config
// and seeds.

// Runs `trials` seeded trainings; writes the effective config echo, per-trial
// epoch CSVs, delay-histogram CSVs and checkpoints, plus a summary JSON with
// best/mean/std test accuracy. The summary contains no wall-clock fields, so
// repeated runs are byte-identical.
int cmd_train(const RunConfig& config);

// Evaluates a checkpoint on the configured test data.
int cmd_eval(const RunConfig& config, const std::string& checkpoint_path);

// One training run-set per theta_d value; emits an ablation CSV of
// {theta_d, params, accuracy mean/std/best}. +inf is labeled "+inf".
int cmd_ablate(const RunConfig& config);

// Cumulative output-spike traces for one sample: per-class cumulative CSV,
// total-count CSV, and the decision time (earliest step after which the
// running argmax is final).
int cmd_analyze(const RunConfig& config, const std::string& checkpoint_path,
                const std::string& sample_path);

// Finite-difference verification of the smoothed network across the h sweep
// plus the delay-gradient sign-agreement study; writes gradcheck.json and
// fails (exit 1) naming the worst parameter on a tolerance breach.
int cmd_gradcheck(const RunConfig& config);

// Writes the synthetic timing task as canonical event files (train/ and
// test/ under out_dir). Byte-identical for identical seeds.
int cmd_synth(const RunConfig& config);

}  // namespace radsnn
