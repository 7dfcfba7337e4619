#include "msf/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

namespace msf {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_double_or_throw(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text +
                      "' as a real number");
  }
  return value;
}

int parse_int_or_throw(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text +
                      "' as an integer");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        out.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

std::string json_scalar_to_string(const std::string& key,
                                  const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[64];
    snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
    return buf;
  }
  throw ConfigError("config key '" + key +
                    "': unsupported JSON value type (expected scalar or "
                    "array of scalars)");
}

std::string json_value_to_string(const std::string& key,
                                 const nlohmann::json& v) {
  if (v.is_array()) {
    std::string joined;
    for (const auto& el : v) {
      if (!joined.empty()) joined += ",";
      joined += json_scalar_to_string(key, el);
    }
    return joined;
  }
  return json_scalar_to_string(key, v);
}

}  // namespace

Config Config::from_string(const std::string& text) {
  Config cfg;
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config JSON must be an object");
    for (const auto& [k, v] : j.items()) {
      if (v.is_object()) {
        for (const auto& [k2, v2] : v.items()) {
          const std::string full = k + "." + k2;
          if (v2.is_object()) {
            throw ConfigError("config key '" + full +
                              "': nesting deeper than one section is not "
                              "supported");
          }
          cfg.values_[full] = json_value_to_string(full, v2);
        }
      } else {
        cfg.values_[k] = json_value_to_string(k, v);
      }
    }
    return cfg;
  }

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header '" + t + "'");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      }
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.values_[full] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

bool Config::has(const std::string& key) const {
  return values_.count(key) != 0;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string Config::raw(const std::string& key) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing required config key '" + key + "'");
  }
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
  return raw(key);
}

int Config::get_int(const std::string& key, int fallback) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int_or_throw(key, it->second);
}

int Config::require_int(const std::string& key) const {
  return parse_int_or_throw(key, raw(key));
}

double Config::get_double(const std::string& key, double fallback) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback
                             : parse_double_or_throw(key, it->second);
}

double Config::require_double(const std::string& key) const {
  return parse_double_or_throw(key, raw(key));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = lower(trim(it->second));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': cannot parse '" + it->second +
                    "' as a boolean");
}

std::vector<double> Config::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& tok : split_list(it->second)) {
    out.push_back(parse_double_or_throw(key, tok));
  }
  return out;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& fallback) const {
  accessed_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const std::string& tok : split_list(it->second)) {
    out.push_back(parse_int_or_throw(key, tok));
  }
  return out;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    (void)v;
    if (!accessed_.count(k)) out.push_back(k);
  }
  return out;
}

}  // namespace msf
