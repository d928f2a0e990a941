#include "swarmsid/params.hpp"

#include <cmath>
#include <random>

namespace swarmsid {

void ParamLayout::add(std::string name, std::vector<std::size_t> shape, std::size_t fan_in) {
  ParamEntry e;
  e.name = std::move(name);
  e.shape = std::move(shape);
  e.offset = total;
  e.fan_in = fan_in;
  total += shape_size(e.shape);
  entries.push_back(std::move(e));
}

std::vector<double> init_params(const ParamLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> params(layout.total);
  for (const ParamEntry& e : layout.entries) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(e.fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const std::size_t n = shape_size(e.shape);
    for (std::size_t i = 0; i < n; ++i) params[e.offset + i] = dist(rng);
  }
  return params;
}

}  // namespace swarmsid
