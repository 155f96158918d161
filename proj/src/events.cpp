#include "radsnn/events.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace radsnn {

void EventStream::validate() const {
  RAD_CHECK(channel_count > 0, "stream declares no channels");
  RAD_CHECK(duration_ms > 0.0f, "stream duration must be positive");
  float prev = 0.0f;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const Event& e = events[k];
    RAD_CHECK(e.time_ms >= 0.0f, "event time must be non-negative");
    RAD_CHECK(e.time_ms < duration_ms, "event time past stream duration");
    RAD_CHECK(e.channel < channel_count, "event channel out of range");
    RAD_CHECK(e.polarity <= 1, "event polarity must be 0 or 1");
    RAD_CHECK(e.time_ms >= prev, "events not sorted by time");
    prev = e.time_ms;
  }
}

SpikeRaster rasterize(const EventStream& stream, double sample_time_ms) {
  RAD_CHECK(sample_time_ms > 0.0, "sample_time_ms must be positive");
  stream.validate();
  const std::size_t steps =
      static_cast<std::size_t>(std::floor(stream.duration_ms / sample_time_ms)) + 1;
  const std::size_t rows =
      stream.split_polarity ? 2u * stream.channel_count : stream.channel_count;
  SpikeRaster raster(rows, steps, sample_time_ms);
  for (const Event& e : stream.events) {
    const auto bin = static_cast<long long>(
        std::floor(static_cast<double>(e.time_ms) / sample_time_ms + 0.5));
    if (bin < 0 || static_cast<std::size_t>(bin) >= steps) {
      throw Error("event at t=" + std::to_string(e.time_ms) +
                  " ms bins outside the sample window");
    }
    const std::size_t row =
        stream.split_polarity ? static_cast<std::size_t>(e.polarity) * stream.channel_count +
                                    e.channel
                              : e.channel;
    raster.set(row, static_cast<std::size_t>(bin), true);
  }
  return raster;
}

namespace {

constexpr char kMagic[4] = {'R', 'A', 'D', 'E'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little,
                "canonical event files assume a little-endian host");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const std::string& path, const char* what) {
  const std::streamoff offset = is.tellg();
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) {
    throw ParseError(path + ": truncated while reading " + std::string(what) +
                     " at byte offset " + std::to_string(static_cast<long long>(offset)));
  }
  return value;
}

EventStream load_canonical(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError(path + ": cannot open file");

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError(path + ": bad magic at byte offset 0");
  }
  const auto version = read_le<std::uint16_t>(is, path, "version");
  if (version != kVersion) {
    throw ParseError(path + ": unsupported version " + std::to_string(version));
  }
  EventStream stream;
  stream.channel_count = read_le<std::uint16_t>(is, path, "channel_count");
  stream.duration_ms = read_le<float>(is, path, "duration_ms");
  stream.label = read_le<std::uint16_t>(is, path, "label");
  const auto count = read_le<std::uint32_t>(is, path, "event_count");
  stream.events.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::streamoff offset = is.tellg();
    std::uint16_t channel;
    Event e;
    is.read(reinterpret_cast<char*>(&channel), sizeof(channel));
    is.read(reinterpret_cast<char*>(&e.time_ms), sizeof(e.time_ms));
    is.read(reinterpret_cast<char*>(&e.polarity), sizeof(e.polarity));
    if (!is) {
      throw ParseError(path + ": truncated event record " + std::to_string(k) +
                       " at byte offset " + std::to_string(static_cast<long long>(offset)));
    }
    e.channel = channel;
    stream.events.push_back(e);
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.time_ms < b.time_ms; });
  stream.validate();
  return stream;
}

// Label suffix "_labelK" before the extension, e.g. sample_003_label2.csv.
std::uint16_t label_from_filename(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
  const std::size_t tag = stem.rfind("_label");
  if (tag == std::string::npos) return 0;
  const std::string digits = stem.substr(tag + 6);
  if (digits.empty()) return 0;
  for (char c : digits)
    if (c < '0' || c > '9') return 0;
  return static_cast<std::uint16_t>(std::stoul(digits));
}

EventStream load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError(path + ": cannot open file");
  EventStream stream;
  stream.label = label_from_filename(path);
  std::string line;
  std::size_t line_no = 0;
  std::uint32_t max_channel = 0;
  float max_time = 0.0f;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    unsigned long channel = 0;
    double time_ms = 0.0;
    unsigned long polarity = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> channel >> c1 >> time_ms >> c2 >> polarity) || c1 != ',' || c2 != ',') {
      if (line_no == 1) continue;  // optional header line
      throw ParseError(path + ": malformed record at line " + std::to_string(line_no));
    }
    if (polarity > 1 || time_ms < 0.0) {
      throw ParseError(path + ": malformed record at line " + std::to_string(line_no));
    }
    Event e;
    e.channel = static_cast<std::uint32_t>(channel);
    e.time_ms = static_cast<float>(time_ms);
    e.polarity = static_cast<std::uint8_t>(polarity);
    max_channel = std::max(max_channel, e.channel);
    max_time = std::max(max_time, e.time_ms);
    stream.events.push_back(e);
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.time_ms < b.time_ms; });
  // CSV carries no geometry; derive it from the data.
  stream.channel_count = max_channel + 1;
  stream.duration_ms = std::floor(max_time) + 1.0f;
  stream.validate();
  return stream;
}

}  // namespace

EventStream load_events(const std::string& path, EventFormat format) {
  return format == EventFormat::kCanonicalBinary ? load_canonical(path) : load_csv(path);
}

void write_events(const EventStream& stream, const std::string& path) {
  stream.validate();
  RAD_CHECK(stream.channel_count <= std::numeric_limits<std::uint16_t>::max(),
            "channel count does not fit the canonical format");
  RAD_CHECK(stream.events.size() <= std::numeric_limits<std::uint32_t>::max(),
            "event count does not fit the canonical format");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  write_le<std::uint16_t>(os, kVersion);
  write_le<std::uint16_t>(os, static_cast<std::uint16_t>(stream.channel_count));
  write_le<float>(os, stream.duration_ms);
  write_le<std::uint16_t>(os, stream.label);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(stream.events.size()));
  for (const Event& e : stream.events) {
    RAD_CHECK(e.channel <= std::numeric_limits<std::uint16_t>::max(), "channel overflows u16");
    write_le<std::uint16_t>(os, static_cast<std::uint16_t>(e.channel));
    write_le<float>(os, e.time_ms);
    write_le<std::uint8_t>(os, e.polarity);
  }
  RAD_CHECK(bool(os), "write failed for " + path);
}

}  // namespace radsnn
