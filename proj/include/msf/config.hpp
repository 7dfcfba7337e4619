#pragma once

// Flat key-value configuration with two on-disk syntaxes:
//
//   * INI-style text: `[section]` headers, `key = value` pairs, `#` comments.
//     Keys inside a section are addressed as "section.key".
//   * A JSON object (detected by a leading '{'), at most one level of
//     nesting: {"sweep": {"n_seeds": 50}} maps to "sweep.n_seeds".
//
// Values are stored as strings and parsed on access.  Every accessor marks
// its key as consumed so callers can reject configs containing keys the
// tool never reads (typo detection).

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace msf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  Config() = default;

  // Reads `path` and dispatches on the first non-space byte ('{' selects
  // JSON, anything else INI).  Throws ConfigError on unreadable files or
  // malformed content.
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  // Inserts or overwrites; used for command-line overrides.
  void set(const std::string& key, const std::string& value);

  // Typed accessors.  The fallback overloads return the fallback when the
  // key is absent; the require_* overloads throw ConfigError instead.
  // Malformed values always throw ConfigError naming the key.
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  int require_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Lists are comma- and/or whitespace-separated.  An absent key yields
  // the fallback; an empty value yields an empty vector.
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;

  // Keys present in the config that no accessor has touched yet.
  std::vector<std::string> unused_keys() const;

  const std::map<std::string, std::string>& entries() const {
    return values_;
  }

 private:
  std::string raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> accessed_;
};

}  // namespace msf
