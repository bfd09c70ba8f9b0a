#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nlpde {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Key-value configuration tree parsed from a TOML-style text file:
/// [section] headers, key = value lines, # comments; values are numbers,
/// booleans, quoted strings, or flat arrays of those. Keys flatten to
/// "section.key" paths.
class ConfigTree {
 public:
  using Value = std::variant<double, bool, std::string, std::vector<double>,
                             std::vector<std::string>>;

  static ConfigTree parse(const std::string& text);
  static ConfigTree parse_file(const std::string& path);

  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  std::vector<double> get_double_array(const std::string& key,
                                       std::vector<double> fallback = {}) const;

  std::vector<std::string> keys() const;
  const std::string& text() const { return text_; }

 private:
  const Value* find(const std::string& key) const;
  std::map<std::string, Value> values_;
  std::string text_;
};

}  // namespace nlpde
