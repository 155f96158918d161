#include "radsnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <type_traits>

namespace radsnn {

namespace {

constexpr char kMagic[4] = {'R', 'A', 'D', 'C'};
constexpr std::uint16_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint files assume a little-endian host");

struct Writer {
  std::string buf;

  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  void put_doubles(const std::vector<double>& v) {
    buf.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
};

struct Reader {
  std::string path;
  std::string buf;
  std::size_t pos = 0;

  template <typename T>
  T get(const char* what) {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos + sizeof(T) > buf.size()) {
      throw ParseError(path + ": truncated while reading " + what + " at byte offset " +
                       std::to_string(pos));
    }
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }

  std::vector<double> get_doubles(std::size_t count, const char* what) {
    if (pos + count * sizeof(double) > buf.size()) {
      throw ParseError(path + ": truncated while reading " + what + " at byte offset " +
                       std::to_string(pos));
    }
    std::vector<double> v(count);
    std::memcpy(v.data(), buf.data() + pos, count * sizeof(double));
    pos += count * sizeof(double);
    return v;
  }

  // Begins a length-prefixed section; returns the offset one past its end.
  std::size_t begin_section(const char* name) {
    const auto length = get<std::uint64_t>(name);
    const std::size_t end = pos + static_cast<std::size_t>(length);
    if (end > buf.size()) {
      throw ParseError(path + ": " + name + " section extends past end of file");
    }
    return end;
  }

  void end_section(const char* name, std::size_t end) {
    if (pos != end) {
      throw ParseError(path + ": " + name + " section length disagrees with its contents");
    }
  }
};

void append_section(Writer& out, const Writer& section) {
  out.put<std::uint64_t>(section.buf.size());
  out.buf += section.buf;
}

Writer encode_spec(const NetworkSpec& spec) {
  Writer w;
  w.put<std::uint64_t>(spec.layer_sizes.size());
  for (std::size_t s : spec.layer_sizes) w.put<std::uint64_t>(s);
  w.put<std::uint8_t>(spec.delays_enabled ? 1 : 0);
  w.put<double>(spec.theta_d_ms);
  w.put<double>(spec.theta_u);
  w.put<double>(spec.sample_time_ms);
  w.put<double>(spec.tau_s_ms);
  w.put<double>(spec.tau_r_ms);
  w.put<std::uint8_t>(spec.surrogate.kind == SurrogateKind::kExponential ? 0 : 1);
  w.put<double>(spec.surrogate.scale);
  w.put<double>(spec.surrogate.sharpness);
  w.put<double>(spec.init_rate);
  w.put<std::uint64_t>(spec.seed);
  return w;
}

NetworkSpec decode_spec(Reader& r) {
  NetworkSpec spec;
  const auto count = r.get<std::uint64_t>("layer count");
  spec.layer_sizes.resize(count);
  for (auto& s : spec.layer_sizes)
    s = static_cast<std::size_t>(r.get<std::uint64_t>("layer size"));
  spec.delays_enabled = r.get<std::uint8_t>("delay flag") != 0;
  spec.theta_d_ms = r.get<double>("theta_d");
  spec.theta_u = r.get<double>("theta_u");
  spec.sample_time_ms = r.get<double>("sample time");
  spec.tau_s_ms = r.get<double>("tau_s");
  spec.tau_r_ms = r.get<double>("tau_r");
  spec.surrogate.kind =
      r.get<std::uint8_t>("surrogate kind") == 0 ? SurrogateKind::kExponential
                                                 : SurrogateKind::kFastSigmoid;
  spec.surrogate.scale = r.get<double>("surrogate scale");
  spec.surrogate.sharpness = r.get<double>("surrogate sharpness");
  spec.init_rate = r.get<double>("init rate");
  spec.seed = r.get<std::uint64_t>("seed");
  return spec;
}

}  // namespace

void save_checkpoint(const Network& net, const Optimizer& opt, const std::string& path) {
  Writer out;
  out.buf.append(kMagic, 4);
  out.put<std::uint16_t>(kVersion);

  append_section(out, encode_spec(net.spec));

  Writer weights;
  for (const SrmLayerParams& layer : net.layers) weights.put_doubles(layer.weights.data());
  append_section(out, weights);

  Writer delays;
  for (const SrmLayerParams& layer : net.layers)
    if (layer.has_delay) delays.put_doubles(layer.delay.raw);
  append_section(out, delays);

  Writer optw;
  const OptimizerConfig& cfg = opt.config();
  optw.put<std::uint8_t>(cfg.rule == OptimizerConfig::Rule::kSgd ? 0 : 1);
  optw.put<double>(cfg.learning_rate_weights);
  optw.put<double>(cfg.learning_rate_delays);
  optw.put<double>(cfg.beta1);
  optw.put<double>(cfg.beta2);
  optw.put<double>(cfg.epsilon);
  optw.put<std::uint64_t>(cfg.seed);
  optw.put<std::uint64_t>(opt.slots().size());
  for (const MomentState& slot : opt.slots()) {
    optw.put<std::uint64_t>(slot.steps);
    optw.put<std::uint64_t>(slot.first.size());
    optw.put_doubles(slot.first);
    optw.put_doubles(slot.second);
  }
  append_section(out, optw);

  Writer seeds;
  seeds.put<std::uint64_t>(net.spec.seed);
  seeds.put<std::uint64_t>(cfg.seed);
  append_section(out, seeds);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(out.buf.data(), static_cast<std::streamsize>(out.buf.size()));
  RAD_CHECK(bool(os), "write failed for ", path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError(path + ": cannot open file");
  Reader r;
  r.path = path;
  r.buf.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());

  if (r.buf.size() < 6 || std::memcmp(r.buf.data(), kMagic, 4) != 0) {
    throw ParseError(path + ": bad magic at byte offset 0");
  }
  r.pos = 4;
  const auto version = r.get<std::uint16_t>("version");
  if (version != kVersion) {
    throw ParseError(path + ": unsupported version " + std::to_string(version));
  }

  std::size_t end = r.begin_section("spec");
  const NetworkSpec spec = decode_spec(r);
  r.end_section("spec", end);
  spec.validate();

  Checkpoint ckpt;
  ckpt.network = build_network(spec);

  end = r.begin_section("weights");
  const std::size_t declared = (end - r.pos) / sizeof(double);
  if (declared != spec.weight_param_count()) {
    throw ParseError(path + ": weights section holds " + std::to_string(declared) +
                     " values but the network needs " +
                     std::to_string(spec.weight_param_count()));
  }
  for (SrmLayerParams& layer : ckpt.network.layers) {
    layer.weights.data() = r.get_doubles(layer.weights.data().size(), "weights");
  }
  r.end_section("weights", end);

  end = r.begin_section("delays");
  for (SrmLayerParams& layer : ckpt.network.layers) {
    if (!layer.has_delay) continue;
    layer.delay.raw = r.get_doubles(layer.delay.size(), "raw delays");
    layer.delay.reclamp();
  }
  r.end_section("delays", end);

  end = r.begin_section("optimizer");
  OptimizerConfig cfg;
  cfg.rule = r.get<std::uint8_t>("optimizer rule") == 0 ? OptimizerConfig::Rule::kSgd
                                                        : OptimizerConfig::Rule::kAdam;
  cfg.learning_rate_weights = r.get<double>("weight learning rate");
  cfg.learning_rate_delays = r.get<double>("delay learning rate");
  cfg.beta1 = r.get<double>("beta1");
  cfg.beta2 = r.get<double>("beta2");
  cfg.epsilon = r.get<double>("epsilon");
  cfg.seed = r.get<std::uint64_t>("optimizer seed");
  ckpt.optimizer_config = cfg;
  const auto slot_count = r.get<std::uint64_t>("slot count");
  ckpt.moments.resize(slot_count);
  for (MomentState& slot : ckpt.moments) {
    slot.steps = r.get<std::uint64_t>("slot steps");
    const auto size = r.get<std::uint64_t>("slot size");
    slot.first = r.get_doubles(size, "first moments");
    slot.second = r.get_doubles(size, "second moments");
  }
  r.end_section("optimizer", end);

  end = r.begin_section("seeds");
  (void)r.get<std::uint64_t>("network seed");
  (void)r.get<std::uint64_t>("shuffle seed");
  r.end_section("seeds", end);

  return ckpt;
}

}  // namespace radsnn
