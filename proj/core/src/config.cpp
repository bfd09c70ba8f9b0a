#include "nlpde/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nlpde {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

ConfigTree::Value parse_scalar(const std::string& raw, int line_no) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') {
      throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
    }
    return s.substr(1, s.size() - 2);
  }
  if (s == "true") return true;
  if (s == "false") return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0') {
    throw ConfigError("config line " + std::to_string(line_no) + ": cannot parse value '" + s +
                      "'");
  }
  return v;
}

}  // namespace

ConfigTree ConfigTree::parse(const std::string& text) {
  ConfigTree tree;
  tree.text_ = text;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    const std::string path = section.empty() ? key : section + "." + key;
    if (tree.values_.count(path)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + path +
                        "'");
    }
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated array");
      }
      std::vector<double> nums;
      std::vector<std::string> strs;
      std::string body = value.substr(1, value.size() - 2);
      std::istringstream items(body);
      std::string item;
      bool any_string = false;
      while (std::getline(items, item, ',')) {
        const Value v = parse_scalar(item, line_no);
        if (std::holds_alternative<double>(v)) {
          nums.push_back(std::get<double>(v));
        } else if (std::holds_alternative<std::string>(v)) {
          any_string = true;
          strs.push_back(std::get<std::string>(v));
        } else {
          throw ConfigError("config line " + std::to_string(line_no) +
                            ": arrays hold numbers or strings");
        }
      }
      if (any_string && !nums.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": mixed array types");
      }
      if (any_string) {
        tree.values_.emplace(path, strs);
      } else {
        tree.values_.emplace(path, nums);
      }
      continue;
    }
    tree.values_.emplace(path, parse_scalar(value, line_no));
  }
  return tree;
}

ConfigTree ConfigTree::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ConfigTree::Value* ConfigTree::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

bool ConfigTree::has(const std::string& key) const { return find(key) != nullptr; }

double ConfigTree::get_double(const std::string& key, double fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const double* d = std::get_if<double>(v)) return *d;
  throw ConfigError("config key '" + key + "' is not a number");
}

double ConfigTree::require_double(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing required config key '" + key + "'");
  return get_double(key, 0.0);
}

int ConfigTree::get_int(const std::string& key, int fallback) const {
  const double d = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) {
    throw ConfigError("config key '" + key + "' is not an integer");
  }
  return i;
}

bool ConfigTree::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const bool* b = std::get_if<bool>(v)) return *b;
  throw ConfigError("config key '" + key + "' is not a boolean");
}

std::string ConfigTree::get_string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const std::string* s = std::get_if<std::string>(v)) return *s;
  throw ConfigError("config key '" + key + "' is not a string");
}

std::string ConfigTree::require_string(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing required config key '" + key + "'");
  return get_string(key, "");
}

std::vector<double> ConfigTree::get_double_array(const std::string& key,
                                                 std::vector<double> fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
  throw ConfigError("config key '" + key + "' is not a numeric array");
}

std::vector<std::string> ConfigTree::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, _] : values_) out.push_back(k);
  return out;
}

}  // namespace nlpde
