#include "ampkit/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ampkit {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
}

struct Cursor {
  const std::string& s;
  size_t i = 0;
  int line;
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
};

ConfigValue parse_value(Cursor& c);

ConfigValue parse_array(Cursor& c) {
  ConfigValue::Array arr;
  ++c.i;  // '['
  c.skip_ws();
  while (!c.done() && c.peek() != ']') {
    arr.push_back(parse_value(c));
    c.skip_ws();
    if (!c.done() && c.peek() == ',') {
      ++c.i;
      c.skip_ws();
    }
  }
  if (c.done()) fail(c.line, "unterminated array");
  ++c.i;  // ']'
  ConfigValue v;
  v.v = std::move(arr);
  return v;
}

ConfigValue parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) fail(c.line, "missing value");
  ConfigValue v;
  const char ch = c.peek();
  if (ch == '[') return parse_array(c);
  if (ch == '"') {
    ++c.i;
    std::string out;
    while (!c.done() && c.peek() != '"') out.push_back(c.s[c.i++]);
    if (c.done()) fail(c.line, "unterminated string");
    ++c.i;
    v.v = out;
    return v;
  }
  // bare token: number, boolean, inf/nan
  size_t start = c.i;
  while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
         c.peek() != ' ' && c.peek() != '\t')
    ++c.i;
  std::string tok = c.s.substr(start, c.i - start);
  if (tok == "true") {
    v.v = true;
    return v;
  }
  if (tok == "false") {
    v.v = false;
    return v;
  }
  if (tok == "inf" || tok == "+inf") {
    v.v = std::numeric_limits<double>::infinity();
    return v;
  }
  if (tok == "-inf") {
    v.v = -std::numeric_limits<double>::infinity();
    return v;
  }
  if (tok == "nan") {
    v.v = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  try {
    size_t used = 0;
    const double d = std::stod(tok, &used);
    if (used != tok.size()) fail(c.line, "bad number '" + tok + "'");
    v.v = d;
    return v;
  } catch (const std::invalid_argument&) {
    fail(c.line, "unrecognized value '" + tok + "'");
  }
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  ConfigTable* current = &cfg.root;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    // strip comments outside of strings
    std::string line;
    bool instr = false;
    for (char ch : raw) {
      if (ch == '"') instr = !instr;
      if (ch == '#' && !instr) break;
      line.push_back(ch);
    }
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "bad table header");
      const std::string name = strip(line.substr(1, line.size() - 2));
      if (name.empty()) fail(lineno, "empty table name");
      current = &cfg.tables[name];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) fail(lineno, "empty key");
    const std::string rhs = strip(line.substr(eq + 1));
    Cursor c{rhs, 0, lineno};
    current->kv[key] = parse_value(c);
    c.skip_ws();
    if (!c.done()) fail(lineno, "trailing characters after value");
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

double ConfigValue::as_double() const {
  if (auto* d = std::get_if<double>(&v)) return *d;
  throw std::runtime_error("config: expected a number");
}
long ConfigValue::as_int() const {
  const double d = as_double();
  const long l = static_cast<long>(std::llround(d));
  if (std::abs(d - l) > 1e-9) throw std::runtime_error("config: expected an integer");
  return l;
}
bool ConfigValue::as_bool() const {
  if (auto* b = std::get_if<bool>(&v)) return *b;
  throw std::runtime_error("config: expected a boolean");
}
const std::string& ConfigValue::as_string() const {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw std::runtime_error("config: expected a string");
}
const ConfigValue::Array& ConfigValue::as_array() const {
  if (auto* a = std::get_if<Array>(&v)) return *a;
  throw std::runtime_error("config: expected an array");
}

const ConfigValue& ConfigTable::at(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("config: missing key '" + key + "'");
  return it->second;
}
double ConfigTable::get_double(const std::string& key) const { return at(key).as_double(); }
double ConfigTable::get_double(const std::string& key, double fallback) const {
  return has(key) ? at(key).as_double() : fallback;
}
long ConfigTable::get_int(const std::string& key) const { return at(key).as_int(); }
long ConfigTable::get_int(const std::string& key, long fallback) const {
  return has(key) ? at(key).as_int() : fallback;
}
bool ConfigTable::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? at(key).as_bool() : fallback;
}
std::string ConfigTable::get_string(const std::string& key) const {
  return at(key).as_string();
}
std::string ConfigTable::get_string(const std::string& key,
                                    const std::string& fallback) const {
  return has(key) ? at(key).as_string() : fallback;
}
std::vector<double> ConfigTable::get_double_array(const std::string& key) const {
  std::vector<double> out;
  for (const auto& v : at(key).as_array()) out.push_back(v.as_double());
  return out;
}

const ConfigTable& Config::table(const std::string& name) const {
  auto it = tables.find(name);
  if (it == tables.end())
    throw std::runtime_error("config: missing table [" + name + "]");
  return it->second;
}

}  // namespace ampkit
