#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmsid {

/// Shape mismatch between operands; message carries both shapes.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major array of doubles. Scalars are shape {1}.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Array() = default;
  explicit Array(std::vector<std::size_t> s);
  Array(std::vector<std::size_t> s, std::vector<double> d);

  static Array scalar(double v) { return Array({1}, {v}); }
  static Array zeros(std::vector<std::size_t> s) { return Array(std::move(s)); }
  static Array full(std::vector<std::size_t> s, double v);

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  std::size_t rows() const { return dim(0); }
  std::size_t cols() const { return dim(1); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  // rank-2 access
  double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  bool same_shape(const Array& other) const { return shape == other.shape; }
  bool all_finite() const;
  std::string shape_str() const;
};

/// Product of dims; throws on zero dims.
std::size_t shape_size(const std::vector<std::size_t>& shape);

}  // namespace swarmsid
