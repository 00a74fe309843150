// Copyright 2026 The Tempo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tempo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad shapes, out-of-range arguments, malformed configs or files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures; the message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <typename... Args>
std::string concat(Args&&... args) {
  std::ostringstream oss;
  (oss << ... << std::forward<Args>(args));
  return oss.str();
}

}  // namespace detail

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
  throw ValidationError(detail::concat(std::forward<Args>(args)...));
}

template <typename... Args>
void require(bool cond, Args&&... args) {
  if (!cond) fail(std::forward<Args>(args)...);
}

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_str(const Shape& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

/// Dense row-major array of doubles, rank 1 to 5. Last dimension is fastest.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape dims, double fill = 0.0)
      : dims_(std::move(dims)), data_(shape_size(dims_), fill) {
    check_rank();
  }

  Tensor(Shape dims, std::vector<double> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    check_rank();
    require(shape_size(dims_) == data_.size(), "tensor data length ",
            data_.size(), " does not match shape ", shape_str(dims_));
  }

  static Tensor zeros_like(const Tensor& t) { return Tensor(t.dims_); }

  const Shape& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Same data, new extents. Element count must be preserved.
  Tensor reshaped(Shape dims) const& {
    Tensor out = *this;
    out.reshape(std::move(dims));
    return out;
  }
  Tensor reshaped(Shape dims) && {
    reshape(std::move(dims));
    return std::move(*this);
  }
  void reshape(Shape dims) {
    require(shape_size(dims) == data_.size(), "cannot reshape ",
            shape_str(dims_), " to ", shape_str(dims));
    dims_ = std::move(dims);
    check_rank();
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  Tensor& operator+=(const Tensor& other) {
    require(dims_ == other.dims_, "shape mismatch in +=: ", shape_str(dims_),
            " vs ", shape_str(other.dims_));
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  Tensor& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  void check_rank() const {
    require(!dims_.empty() && dims_.size() <= 5, "tensor rank must be 1..5, got ",
            dims_.size());
  }

  Shape dims_;
  std::vector<double> data_;
};

/// A value with its same-shaped gradient accumulator.
struct GradPair {
  Tensor value;
  Tensor grad;

  explicit GradPair(Tensor v) : value(std::move(v)), grad(value.dims()) {}
};

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  require(a.dims() == b.dims(), "shape mismatch: ", shape_str(a.dims()), " vs ",
          shape_str(b.dims()));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    if (d < 0) d = -d;
    if (d > m) m = d;
  }
  return m;
}

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(a) ^ (b + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0,1) from the top 53 bits of a 64-bit draw.
template <typename Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tempo
