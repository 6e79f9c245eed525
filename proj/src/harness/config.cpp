#include "fpinn/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fpinn::harness {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  long v = 0;
  const auto t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  return v;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      if (!cfg.data_.count(section)) cfg.section_order_.push_back(section);
      cfg.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (cfg.has(section, key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    if (!cfg.data_.count(section)) cfg.section_order_.push_back(section);
    cfg.data_[section].emplace_back(key, value);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

const std::string* ConfigFile::find(const std::string& section, const std::string& key) const {
  auto it = data_.find(section);
  if (it == data_.end()) return nullptr;
  for (const auto& [k, v] : it->second)
    if (k == key) return &v;
  return nullptr;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::vector<std::string> ConfigFile::sections() const { return section_order_; }

std::vector<std::string> ConfigFile::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (auto it = data_.find(section); it != data_.end())
    for (const auto& kv : it->second) out.push_back(kv.first);
  return out;
}

std::string ConfigFile::str(const std::string& section, const std::string& key, const std::string& fallback) const {
  const auto* v = find(section, key);
  return v ? *v : fallback;
}

std::string ConfigFile::str(const std::string& section, const std::string& key) const {
  const auto* v = find(section, key);
  if (!v) throw ConfigError(origin_ + ": missing required key [" + section + "] " + key);
  return *v;
}

double ConfigFile::num(const std::string& section, const std::string& key, double fallback) const {
  const auto* v = find(section, key);
  return v ? parse_double(*v, "[" + section + "] " + key) : fallback;
}

long ConfigFile::integer(const std::string& section, const std::string& key, long fallback) const {
  const auto* v = find(section, key);
  return v ? parse_long(*v, "[" + section + "] " + key) : fallback;
}

bool ConfigFile::flag(const std::string& section, const std::string& key, bool fallback) const {
  const auto* v = find(section, key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("[" + section + "] " + key + ": expected a boolean, got '" + *v + "'");
}

std::vector<std::string> ConfigFile::list(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  const auto* v = find(section, key);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ConfigFile::num_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : list(section, key)) out.push_back(parse_double(s, "[" + section + "] " + key));
  return out;
}

std::vector<long> ConfigFile::int_list(const std::string& section, const std::string& key) const {
  std::vector<long> out;
  for (const auto& s : list(section, key)) out.push_back(parse_long(s, "[" + section + "] " + key));
  return out;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!data_.count(section)) section_order_.push_back(section);
  auto& entries = data_[section];
  for (auto& [k, v] : entries)
    if (k == key) {
      v = value;
      return;
    }
  entries.emplace_back(key, value);
}

}  // namespace fpinn::harness
