#include "swarmsid/array.hpp"

#include <cmath>
#include <sstream>

namespace swarmsid {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw ShapeError("array shape must have at least one dimension");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("array shape has a zero dimension");
    n *= d;
  }
  return n;
}

Array::Array(std::vector<std::size_t> s) : shape(std::move(s)), data(shape_size(shape), 0.0) {}

Array::Array(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (data.size() != shape_size(shape)) {
    std::ostringstream os;
    os << "array data length " << data.size() << " does not match shape " << shape_str();
    throw ShapeError(os.str());
  }
}

Array Array::full(std::vector<std::size_t> s, double v) {
  Array a(std::move(s));
  for (double& x : a.data) x = v;
  return a;
}

bool Array::all_finite() const {
  for (double x : data)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Array::shape_str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

}  // namespace swarmsid
