#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "radsnn/checks.hpp"

namespace radsnn {

// Dense row-major matrix of doubles. Rows index neurons, columns index time
// steps everywhere in this library.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  Grid& operator+=(const Grid& other) {
    RAD_CHECK(rows_ == other.rows_ && cols_ == other.cols_, "grid shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
  }

  Grid& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Binary spike trains: [neurons x steps] with values in {0,1}, sampled every
// sample_time_ms milliseconds (step n covers t = n * sample_time_ms).
struct SpikeRaster {
  std::size_t neurons = 0;
  std::size_t steps = 0;
  double sample_time_ms = 1.0;
  std::vector<std::uint8_t> data;  // row-major

  SpikeRaster() = default;
  SpikeRaster(std::size_t neurons_, std::size_t steps_, double sample_time)
      : neurons(neurons_), steps(steps_), sample_time_ms(sample_time),
        data(neurons_ * steps_, 0) {}

  std::uint8_t get(std::size_t i, std::size_t n) const { return data[i * steps + n]; }
  void set(std::size_t i, std::size_t n, bool on) { data[i * steps + n] = on ? 1 : 0; }

  const std::uint8_t* row(std::size_t i) const { return data.data() + i * steps; }
  std::uint8_t* row(std::size_t i) { return data.data() + i * steps; }

  std::size_t total_spikes() const {
    std::size_t c = 0;
    for (auto v : data) c += v;
    return c;
  }

  std::size_t row_spikes(std::size_t i) const {
    std::size_t c = 0;
    for (std::size_t n = 0; n < steps; ++n) c += get(i, n);
    return c;
  }

  Grid to_grid() const {
    Grid g(neurons, steps);
    for (std::size_t i = 0; i < neurons; ++i)
      for (std::size_t n = 0; n < steps; ++n) g.at(i, n) = get(i, n);
    return g;
  }

  friend bool operator==(const SpikeRaster&, const SpikeRaster&) = default;
};

}  // namespace radsnn
