#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace swarmsid {

/// Flat `key = value` configuration: one assignment per line, '#' comments.
/// Keys are validated against the known set so typos fail loudly.
class KvConfig {
 public:
  static KvConfig parse_file(const std::string& path);
  static bool is_known_key(const std::string& key);

  /// Throws std::invalid_argument on an unknown key.
  void set(const std::string& key, const std::string& value);
  /// Parses "key=value" (as passed on a command line).
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace swarmsid
