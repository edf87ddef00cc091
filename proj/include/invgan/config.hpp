#pragma once

// Flat `key = value` configuration files with `#` comments.

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace invgan {

class Config {
 public:
  Config() = default;

  /// Throws ConfigError on malformed lines, empty keys or duplicate keys.
  static Config parse(std::istream& is, const std::string& source = "config");
  static Config parse_string(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Inserts or replaces a value (command-line overrides).
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  // Typed getters mark the key as used. Type errors throw ConfigError.
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long get_int(const std::string& key, long def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<std::string> get_string_list(const std::string& key, const std::vector<std::string>& def) const;
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& def) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& def) const;

  /// Throws ConfigError naming every key no getter has asked for.
  void reject_unknown() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string* lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace invgan
