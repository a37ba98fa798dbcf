#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace ampkit {

// Minimal TOML-subset reader covering what the experiment configs need:
// [table] headers, bare keys, numbers (including inf/nan), strings, booleans
// and (nested) arrays. Line comments start with '#'.
class ConfigValue {
 public:
  using Array = std::vector<ConfigValue>;
  std::variant<double, std::string, bool, Array> v;

  double as_double() const;
  long as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const Array& as_array() const;
};

class ConfigTable {
 public:
  std::map<std::string, ConfigValue> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_array(const std::string& key) const;
  const ConfigValue& at(const std::string& key) const;
};

class Config {
 public:
  ConfigTable root;
  std::map<std::string, ConfigTable> tables;

  bool has_table(const std::string& name) const { return tables.count(name) > 0; }
  const ConfigTable& table(const std::string& name) const;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);
};

}  // namespace ampkit
