#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace optomech::cli {

/// Raised for anything wrong with the config file; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Value {
  enum class Kind { String, Number, Bool, Array };
  Kind kind = Kind::String;
  std::string text;  // String
  double number = 0.0;
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

/// Key-value tree in a TOML subset: `[section]` headers, `key = value` with
/// quoted strings, numbers, booleans and one-level arrays, `#` comments.
/// Keys are stored as "section.key".
class Document {
 public:
  static Document parse(const std::string& text, const std::string& origin);
  static Document load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  bool has_section(const std::string& section) const;

  /// Physical quantity in SI. `unit` is the canonical unit ("H", "rad/s",
  /// "F/m", "" for dimensionless). Strings such as "5 GHz" are converted;
  /// a bare number is taken as already SI.
  double quantity(const std::string& key, const std::string& unit) const;
  double quantity(const std::string& key, const std::string& unit, double fallback) const;
  std::vector<double> quantities(const std::string& key, const std::string& unit) const;

  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> strings(const std::string& key) const;
  bool boolean(const std::string& key, bool fallback) const;
  long long integer(const std::string& key, long long fallback) const;

  /// Throws for any key that was never read, naming its line.
  void reject_unused() const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const Value& get(const std::string& key) const;

  std::string origin_;
  std::map<std::string, Value> values_;
  std::vector<std::string> sections_;
  mutable std::map<std::string, bool> used_;
};

/// Parses "<number> [unit]" against a canonical unit. Frequencies in Hz given
/// for an angular unit (rad/s) are multiplied by 2 pi. Throws
/// std::invalid_argument with a short reason.
double parse_quantity(const std::string& text, const std::string& unit);

}  // namespace optomech::cli
