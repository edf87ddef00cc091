#include "invgan/config.hpp"

#include "invgan/format.hpp"
#include "invgan/types.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace invgan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (c.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream ss(text);
  return parse(ss, "string");
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse(f, path);
}

const std::string* Config::lookup(const std::string& key) const {
  used_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
  const auto* v = lookup(key);
  return v ? *v : def;
}

double Config::get_double(const std::string& key, double def) const {
  const auto* v = lookup(key);
  return v ? to_double(key, *v) : def;
}

long Config::get_int(const std::string& key, long def) const {
  const auto* v = lookup(key);
  return v ? to_long(key, *v) : def;
}

bool Config::get_bool(const std::string& key, bool def) const {
  const auto* v = lookup(key);
  if (!v) return def;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + *v + "'");
}

std::vector<std::string> Config::get_string_list(const std::string& key, const std::vector<std::string>& def) const {
  const auto* v = lookup(key);
  return v ? split_list(*v) : def;
}

std::vector<long> Config::get_int_list(const std::string& key, const std::vector<long>& def) const {
  const auto* v = lookup(key);
  if (!v) return def;
  std::vector<long> out;
  for (const auto& s : split_list(*v)) out.push_back(to_long(key, s));
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& def) const {
  const auto* v = lookup(key);
  if (!v) return def;
  std::vector<double> out;
  for (const auto& s : split_list(*v)) out.push_back(to_double(key, s));
  return out;
}

void Config::reject_unknown() const {
  std::string bad;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
  if (!bad.empty()) throw ConfigError("unknown config key(s): " + bad);
}

}  // namespace invgan
