#pragma once

#include <string>

#include "radsnn/network.hpp"
#include "radsnn/optimizer.hpp"

namespace radsnn {

struct Checkpoint {
  Network network;
  OptimizerConfig optimizer_config;
  std::vector<MomentState> moments;

  Optimizer make_optimizer() const {
    Optimizer opt(optimizer_config);
    opt.slots() = moments;
    return opt;
  }
};

// Versioned binary container, little-endian: magic "RADC", version u16, then
// length-prefixed sections in fixed order — network spec, weight matrices
// (f64 row-major per layer), raw delays (f64 per delayed layer), optimizer
// config and moments (f64), seeds. Raw (pre-clamp) delays are preserved;
// clamped values are recomputed on load.
void save_checkpoint(const Network& net, const Optimizer& opt, const std::string& path);

// Round-trips everything bit-exactly. Throws ParseError on a bad magic,
// unsupported version, or any section whose size disagrees with the header.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace radsnn
