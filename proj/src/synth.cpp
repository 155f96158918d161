#include "radsnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace radsnn {

namespace {

// The template RNG is fixed so that the class-defining structure is the same
// for every seed; user seeds only perturb individual samples.
constexpr std::uint64_t kTemplateSeed = 0x52414453594e5448ull;

struct Template {
  // micro[c][r]: fixed offset of channel c's r-th spike relative to its anchor
  std::vector<std::vector<double>> micro;
  std::vector<double> anchors;       // anchor time per slot
  std::vector<int> group_of_channel; // contiguous groups
};

Template build_template(const SynthParams& p) {
  Template t;
  std::mt19937_64 rng(kTemplateSeed);
  std::uniform_real_distribution<double> micro_dist(0.0, p.micro_offset_span_ms);
  t.micro.resize(p.channel_count);
  for (int c = 0; c < p.channel_count; ++c) {
    t.micro[c].resize(p.spikes_per_channel);
    for (int r = 0; r < p.spikes_per_channel; ++r) t.micro[c][r] = micro_dist(rng);
    std::sort(t.micro[c].begin(), t.micro[c].end());
  }
  t.anchors.resize(p.class_count);
  for (int j = 0; j < p.class_count; ++j) {
    t.anchors[j] = p.anchor_start_ms + j * p.anchor_gap_ms;
  }
  t.group_of_channel.resize(p.channel_count);
  for (int c = 0; c < p.channel_count; ++c) {
    t.group_of_channel[c] = std::min(p.class_count - 1,
                                     c * p.class_count / p.channel_count);
  }
  return t;
}

}  // namespace

std::vector<EventStream> synth_temporal_task(const SynthParams& p, std::uint64_t seed) {
  RAD_CHECK(p.class_count >= 2, "class_count must be at least 2");
  RAD_CHECK(p.channel_count >= 2, "channel_count must be at least 2");
  RAD_CHECK(p.samples_per_class >= 1, "samples_per_class must be at least 1");
  RAD_CHECK(p.duration_ms > 0.0, "duration_ms must be positive");
  const double last_anchor = p.anchor_start_ms + (p.class_count - 1) * p.anchor_gap_ms;
  RAD_CHECK(last_anchor + p.micro_offset_span_ms + 4.0 * p.jitter_ms < p.duration_ms,
            "anchors and offsets do not fit the sample duration");

  const Template tmpl = build_template(p);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, p.jitter_ms);

  const float max_time = std::nextafter(static_cast<float>(p.duration_ms), 0.0f);
  std::vector<EventStream> out;
  out.reserve(static_cast<std::size_t>(p.samples_per_class) * p.class_count);
  for (int s = 0; s < p.samples_per_class; ++s) {
    for (int k = 0; k < p.class_count; ++k) {
      EventStream stream;
      stream.channel_count = static_cast<std::uint32_t>(p.channel_count);
      stream.duration_ms = static_cast<float>(p.duration_ms);
      stream.label = static_cast<std::uint16_t>(k);
      for (int c = 0; c < p.channel_count; ++c) {
        const int slot = (tmpl.group_of_channel[c] + k) % p.class_count;
        for (int r = 0; r < p.spikes_per_channel; ++r) {
          double t = tmpl.anchors[slot] + tmpl.micro[c][r];
          if (p.jitter_ms > 0.0) t += jitter(rng);
          t = std::clamp(t, 0.0, static_cast<double>(max_time));
          Event e;
          e.channel = static_cast<std::uint32_t>(c);
          e.time_ms = std::min(static_cast<float>(t), max_time);
          e.polarity = 0;
          stream.events.push_back(e);
        }
      }
      std::stable_sort(stream.events.begin(), stream.events.end(),
                       [](const Event& a, const Event& b) { return a.time_ms < b.time_ms; });
      stream.validate();
      out.push_back(std::move(stream));
    }
  }
  return out;
}

std::vector<EventStream> synth_temporal_task(int class_count, int channel_count,
                                             int samples_per_class, std::uint64_t seed) {
  SynthParams p;
  p.class_count = class_count;
  p.channel_count = channel_count;
  p.samples_per_class = samples_per_class;
  return synth_temporal_task(p, seed);
}

}  // namespace radsnn
