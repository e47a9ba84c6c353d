#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aquafeat/errors.hpp"

namespace aquafeat {

// (batch, channels, height, width), row-major with width fastest.
struct Shape4 {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  std::int64_t numel() const {
    return static_cast<std::int64_t>(n) * c * h * w;
  }
  bool operator==(const Shape4&) const = default;

  std::string str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
           std::to_string(h) + "," + std::to_string(w) + ")";
  }
};

template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape4 shape, T fill = T(0))
      : shape_(shape), data_(check_size(shape), fill) {}
  Tensor(Shape4 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != shape_.numel()) {
      throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                       " does not match shape " + shape_.str());
    }
  }

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(int n, int c, int h, int w) { return data_[offset(n, c, h, w)]; }
  const T& at(int n, int c, int h, int w) const { return data_[offset(n, c, h, w)]; }

  std::size_t offset(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }

  // Pointer to the start of row (n, c, h, 0).
  T* row(int n, int c, int h) { return data_.data() + offset(n, c, h, 0); }
  const T* row(int n, int c, int h) const { return data_.data() + offset(n, c, h, 0); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const {
    for (T v : data_) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  // Consumed when the tensor is inserted into a graph as a leaf.
  bool requires_grad = false;

 private:
  static std::size_t check_size(const Shape4& s) {
    if (s.n < 0 || s.c < 0 || s.h < 0 || s.w < 0) {
      throw ShapeError("negative dimension in shape " + s.str());
    }
    return static_cast<std::size_t>(s.numel());
  }

  Shape4 shape_;
  std::vector<T> data_;
};

}  // namespace aquafeat
