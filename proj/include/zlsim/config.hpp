#pragma once

// Flat key=value config files. '#' starts a comment; blank lines are
// ignored; later assignments win. Overrides use the same "key=value" form.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace zlsim::config {

class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "<stream>");
  static KeyValues load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  // "key=value"
  void apply_override(const std::string& assignment);
  void merge(const KeyValues& other);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  // Keys not in `known` and not starting with any of `known_prefixes`.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known,
                                        const std::vector<std::string>& known_prefixes = {}) const;

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& key, const std::string& text);

}  // namespace zlsim::config
