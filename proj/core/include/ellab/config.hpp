#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ellab {

/// Flat `key = value` configuration. One entry per line, `#` starts a
/// comment. Values holding lists are whitespace or comma separated.
///
/// Every typed getter marks its key as consumed so callers can reject
/// keys nobody asked for via unused_keys().
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const;
  bool empty() const { return entries_.empty(); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  /// Keys present in the file but never read, in sorted order.
  std::vector<std::string> unused_keys() const;

  /// Canonical text form: sorted keys, one per line.
  std::string to_string() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string& require(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

/// Locale-independent parse of a full string as double; throws ConfigError.
double parse_double(std::string_view text, std::string_view what);

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double value);

}  // namespace ellab
