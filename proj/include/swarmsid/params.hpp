#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmsid/array.hpp"

namespace swarmsid {

struct ParamEntry {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t fan_in = 1;
};

/// Maps named tensors onto one flat parameter vector.
struct ParamLayout {
  std::vector<ParamEntry> entries;
  std::size_t total = 0;
  void add(std::string name, std::vector<std::size_t> shape, std::size_t fan_in);
};

/// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per tensor, seeded.
std::vector<double> init_params(const ParamLayout& layout, std::uint64_t seed);

}  // namespace swarmsid
