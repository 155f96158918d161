#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radsnn/grid.hpp"

namespace radsnn {

// One sensor event. Times are milliseconds; the canonical file format stores
// them as f32, so they are kept at f32 precision in memory as well (this makes
// write/load round trips exact).
struct Event {
  std::uint32_t channel = 0;
  float time_ms = 0.0f;
  std::uint8_t polarity = 0;  // 0 or 1

  friend bool operator==(const Event&, const Event&) = default;
};

// A labelled recording: events ordered by time, plus the stream geometry.
struct EventStream {
  std::vector<Event> events;  // nondecreasing in time
  std::uint32_t channel_count = 0;
  float duration_ms = 0.0f;
  std::uint16_t label = 0;
  // When true, rasterize maps (channel, polarity) onto row
  // polarity * channel_count + channel; otherwise polarity is ignored.
  bool split_polarity = false;

  // Throws unless events are sorted, in range and before duration_ms.
  void validate() const;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

// Bin events into a binary raster. Event at time t lands in bin
// round-half-up(t / Ts); multiple events per bin collapse to a single spike.
// N_s = floor(duration_ms / Ts) + 1. Throws if any event bins past the window.
SpikeRaster rasterize(const EventStream& stream, double sample_time_ms);

enum class EventFormat { kCanonicalBinary, kCsv };

// Canonical binary event file, little-endian:
//   magic "RADE" | version u16 = 1 | channel_count u16 | duration_ms f32 |
//   label u16 | event_count u32 | event_count x {channel u16, time_ms f32,
//   polarity u8}
// CSV alternative: one "channel,time_ms,polarity" line per event, optional
// header line; the label is read from a "_labelK" filename suffix.
EventStream load_events(const std::string& path, EventFormat format);

// Writes the canonical binary format.
void write_events(const EventStream& stream, const std::string& path);

}  // namespace radsnn
