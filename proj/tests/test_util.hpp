#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "radsnn/grid.hpp"

namespace radsnn::testutil {

// Scratch directory under the system temp root, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("radsnn_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline SpikeRaster random_raster(std::size_t neurons, std::size_t steps, double rate,
                                 std::uint64_t seed, double sample_time_ms = 1.0) {
  SpikeRaster raster(neurons, steps, sample_time_ms);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution fire(rate);
  for (std::size_t i = 0; i < neurons; ++i)
    for (std::size_t n = 0; n < steps; ++n)
      if (fire(rng)) raster.set(i, n, true);
  return raster;
}

inline Grid random_grid(std::size_t rows, std::size_t cols, std::uint64_t seed,
                        double lo = -1.0, double hi = 1.0) {
  Grid g(rows, cols);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : g.data()) v = dist(rng);
  return g;
}

}  // namespace radsnn::testutil
