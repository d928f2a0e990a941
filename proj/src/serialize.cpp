#include "swarmsid/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace swarmsid {

namespace {
constexpr const char* kMagic = "# swarmsid params v1";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_params(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& header,
                 std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kMagic << "\n";
  for (const auto& [k, v] : header) out << "# " << k << " = " << v << "\n";
  for (double x : values) out << format_double(x) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParamFile load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMagic)
    throw std::runtime_error("bad parameter file magic in " + path);
  ParamFile pf;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      pf.header[trim(t.substr(1, eq - 1))] = trim(t.substr(eq + 1));
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
      throw std::runtime_error("bad numeric line in " + path + ": '" + t + "'");
    pf.values.push_back(v);
  }
  return pf;
}

}  // namespace swarmsid
