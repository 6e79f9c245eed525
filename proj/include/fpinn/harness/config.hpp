#pragma once

// key = value text with [section] headers; '#' starts a comment.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpinn::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<string>");
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;

  std::string str(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::string str(const std::string& section, const std::string& key) const;  // required
  double num(const std::string& section, const std::string& key, double fallback) const;
  long integer(const std::string& section, const std::string& key, long fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<std::string> list(const std::string& section, const std::string& key) const;
  std::vector<double> num_list(const std::string& section, const std::string& key) const;
  std::vector<long> int_list(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<std::string> section_order_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> data_;
  const std::string* find(const std::string& section, const std::string& key) const;
};

double parse_double(const std::string& s, const std::string& what);
long parse_long(const std::string& s, const std::string& what);

}  // namespace fpinn::harness
