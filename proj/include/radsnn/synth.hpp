#pragma once

#include <cstdint>
#include <vector>

#include "radsnn/events.hpp"

namespace radsnn {

// Synthetic classification task where classes differ only in spike timing.
//
// Channels are split into class_count groups. Every sample contains one burst
// per group; class k sends group g's burst at anchor slot (g + k) % K. Each
// channel fires spikes_per_channel spikes at its group's anchor plus a fixed
// per-channel micro-offset pattern, plus per-sample Gaussian jitter. The
// anchor/micro-offset template is fixed (independent of the seed), so
// per-channel spike counts and the per-time spike totals are identical across
// classes; only which channel fires when carries class information. A
// count-based classifier is at chance on this data by construction.
struct SynthParams {
  int class_count = 2;
  int channel_count = 16;
  int samples_per_class = 100;
  double duration_ms = 300.0;
  int spikes_per_channel = 4;
  double anchor_start_ms = 60.0;
  double anchor_gap_ms = 50.0;
  double micro_offset_span_ms = 30.0;
  double jitter_ms = 2.0;
};

// Deterministic for a fixed seed; the seed drives only the per-sample jitter.
// Samples are ordered (sample 0 class 0, sample 0 class 1, ..., sample 1
// class 0, ...).
std::vector<EventStream> synth_temporal_task(const SynthParams& params, std::uint64_t seed);

std::vector<EventStream> synth_temporal_task(int class_count, int channel_count,
                                             int samples_per_class, std::uint64_t seed);

}  // namespace radsnn
