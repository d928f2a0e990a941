#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace swarmsid {

/// Flat parameter-vector file: '#'-prefixed key = value descriptor lines,
/// then one value per line at 17 significant digits (lossless for doubles).
void save_params(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& header,
                 std::span<const double> values);

struct ParamFile {
  std::map<std::string, std::string> header;
  std::vector<double> values;
};

ParamFile load_params(const std::string& path);

/// Formats a double so that parsing it back recovers the exact bits.
std::string format_double(double v);

}  // namespace swarmsid
