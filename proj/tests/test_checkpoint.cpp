#include <filesystem>
#include <fstream>
#include <doctest.h>

#include "radsnn/checkpoint.hpp"
#include "radsnn/synth.hpp"
#include "test_util.hpp"

using namespace radsnn;

namespace {

// A network with battle scars: trained a little so delays, moments and raw
// values are all nontrivial.
std::pair<Network, Optimizer> trained_pair(std::uint64_t seed) {
  NetworkSpec spec;
  spec.layer_sizes = {16, 10, 2};
  spec.theta_d_ms = 64.0;
  spec.seed = seed;
  spec.init_rate = 0.1;
  Network net = build_network(spec);
  TrainConfig config;
  config.epochs = 2;
  Optimizer opt(config.optimizer);
  SynthParams p;
  p.samples_per_class = 4;
  const Dataset train = rasterize_all(synth_temporal_task(p, 33), 1.0, false);
  run_training(net, opt, train, Dataset{}, config);
  return {std::move(net), std::move(opt)};
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("save/load round-trips parameters, moments and configs bit-exactly") {
  testutil::TempDir dir("ckpt");
  auto [net, opt] = trained_pair(5);
  // Push one raw delay outside the clamp range to prove raw values persist.
  net.layers[0].delay.raw[0] = -1.5;
  net.layers[0].delay.raw[1] = 99.0;
  net.layers[0].delay.reclamp();
  const std::string path = dir.file("model.radc");
  save_checkpoint(net, opt, path);
  const Checkpoint loaded = load_checkpoint(path);

  CHECK(loaded.network.spec.layer_sizes == net.spec.layer_sizes);
  CHECK(loaded.network.spec.theta_d_ms == net.spec.theta_d_ms);
  CHECK(loaded.network.spec.seed == net.spec.seed);
  REQUIRE(loaded.network.layers.size() == net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(loaded.network.layers[l].weights == net.layers[l].weights);
    CHECK(loaded.network.layers[l].delay == net.layers[l].delay);
    CHECK(loaded.network.layers[l].has_delay == net.layers[l].has_delay);
  }
  CHECK(loaded.network.layers[0].delay.raw[0] == -1.5);
  CHECK(loaded.network.layers[0].delay.clamped[0] == 0.0);
  CHECK(loaded.network.layers[0].delay.raw[1] == 99.0);
  CHECK(loaded.network.layers[0].delay.clamped[1] == 64.0);

  CHECK(loaded.optimizer_config.learning_rate_weights ==
        opt.config().learning_rate_weights);
  CHECK(loaded.optimizer_config.seed == opt.config().seed);
  REQUIRE(loaded.moments.size() == opt.slots().size());
  for (std::size_t s = 0; s < loaded.moments.size(); ++s) {
    CHECK(loaded.moments[s].steps == opt.slots()[s].steps);
    CHECK(loaded.moments[s].first == opt.slots()[s].first);
    CHECK(loaded.moments[s].second == opt.slots()[s].second);
  }
}

TEST_CASE("a reloaded network evaluates identically") {
  testutil::TempDir dir("ckpt");
  auto [net, opt] = trained_pair(6);
  const std::string path = dir.file("model.radc");
  save_checkpoint(net, opt, path);
  const Checkpoint loaded = load_checkpoint(path);
  SynthParams p;
  p.samples_per_class = 6;
  const Dataset test = rasterize_all(synth_temporal_task(p, 44), 1.0, false);
  const TargetSpec target;
  const Evaluation a = evaluate(net, test, target);
  const Evaluation b = evaluate(loaded.network, test, target);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.mean_loss == b.mean_loss);
  CHECK(a.confusion == b.confusion);
}

TEST_CASE("training resumes bit-identically from a checkpoint") {
  testutil::TempDir dir("ckpt");
  SynthParams p;
  p.samples_per_class = 4;
  const Dataset train = rasterize_all(synth_temporal_task(p, 55), 1.0, false);
  NetworkSpec spec;
  spec.layer_sizes = {16, 8, 2};
  spec.seed = 7;
  spec.init_rate = 0.1;
  TrainConfig config;
  config.epochs = 2;

  // Uninterrupted: 4 epochs straight.
  Network straight = build_network(spec);
  Optimizer opt_straight(config.optimizer);
  TrainConfig four = config;
  four.epochs = 4;
  run_training(straight, opt_straight, train, Dataset{}, four);

  // Interrupted: 2 epochs, checkpoint, reload, 2 more. The shuffle stream
  // lives in the trainer, not the checkpoint, so both halves share one rng
  // exactly like the uninterrupted loop does.
  Network half = build_network(spec);
  Optimizer opt_half(config.optimizer);
  std::mt19937_64 shuffle(config.optimizer.seed);
  for (int e = 0; e < 2; ++e) train_epoch(half, opt_half, train, config, shuffle);
  const std::string path = dir.file("mid.radc");
  save_checkpoint(half, opt_half, path);
  Checkpoint resumed = load_checkpoint(path);
  Optimizer opt_resumed = resumed.make_optimizer();
  for (int e = 0; e < 2; ++e)
    train_epoch(resumed.network, opt_resumed, train, config, shuffle);

  for (std::size_t l = 0; l < straight.layers.size(); ++l) {
    CHECK(straight.layers[l].weights == resumed.network.layers[l].weights);
    CHECK(straight.layers[l].delay == resumed.network.layers[l].delay);
  }
}

TEST_CASE("bad magic is rejected") {
  testutil::TempDir dir("ckpt");
  const std::string path = dir.file("junk.radc");
  std::ofstream(path, std::ios::binary) << "NOPE and then some bytes";
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
}

TEST_CASE("truncated checkpoints are rejected") {
  testutil::TempDir dir("ckpt");
  auto [net, opt] = trained_pair(8);
  const std::string path = dir.file("model.radc");
  save_checkpoint(net, opt, path);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full / 2);
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
}

TEST_CASE("a corrupted section length is rejected") {
  testutil::TempDir dir("ckpt");
  auto [net, opt] = trained_pair(9);
  const std::string path = dir.file("model.radc");
  save_checkpoint(net, opt, path);
  // Stamp garbage over the first section length (u64 right after magic+version).
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(6);
  const std::uint64_t bogus = ~0ull;
  f.write(reinterpret_cast<const char*>(&bogus), sizeof(bogus));
  f.close();
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
}

TEST_CASE("a checkpoint whose layer sizes disagree with its weights is rejected") {
  testutil::TempDir dir("ckpt");
  auto [net, opt] = trained_pair(10);
  const std::string path = dir.file("model.radc");
  save_checkpoint(net, opt, path);
  // Grow the middle layer size in place: magic(4) + version(2) + section
  // length(8) + layer count(8) + first size(8) puts the second size at 30.
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(30);
  const std::uint64_t bigger = 11;
  f.write(reinterpret_cast<const char*>(&bigger), sizeof(bigger));
  f.close();
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("weights section"),
                       ParseError);
}

TEST_CASE("missing files are reported") {
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/path/model.radc"), Error);
}

}  // TEST_SUITE
