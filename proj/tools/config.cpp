#include "config.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace optomech::cli {

namespace {

// Exponents of kg, m, s, A, K, rad.
using Dim = std::array<int, 6>;

struct Unit {
  double scale;
  Dim dim;
};

struct Symbol {
  const char* name;
  Unit unit;
};

constexpr double two_pi = 2.0 * std::numbers::pi;

const Symbol symbols[] = {
    {"s", {1.0, {0, 0, 1, 0, 0, 0}}},
    {"Hz", {two_pi, {0, 0, -1, 0, 0, 1}}},
    {"rad", {1.0, {0, 0, 0, 0, 0, 1}}},
    {"m", {1.0, {0, 1, 0, 0, 0, 0}}},
    {"g", {1e-3, {1, 0, 0, 0, 0, 0}}},
    {"K", {1.0, {0, 0, 0, 0, 1, 0}}},
    {"A", {1.0, {0, 0, 0, 1, 0, 0}}},
    {"V", {1.0, {1, 2, -3, -1, 0, 0}}},
    {"ohm", {1.0, {1, 2, -3, -2, 0, 0}}},
    {"\xCE\xA9", {1.0, {1, 2, -3, -2, 0, 0}}},  // Omega sign
    {"F", {1.0, {-1, -2, 4, 2, 0, 0}}},
    {"H", {1.0, {1, 2, -2, -2, 0, 0}}},
    {"W", {1.0, {1, 2, -3, 0, 0, 0}}},
    {"J", {1.0, {1, 2, -2, 0, 0, 0}}},
    {"N", {1.0, {1, 1, -2, 0, 0, 0}}},
};

struct Prefix {
  const char* name;
  double scale;
};

const Prefix prefixes[] = {
    {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"\xC2\xB5", 1e-6}, {"m", 1e-3},
    {"k", 1e3},   {"M", 1e6},   {"G", 1e9},  {"T", 1e12},
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const Unit* find_symbol(const std::string& s) {
  for (const auto& sym : symbols)
    if (s == sym.name) return &sym.unit;
  return nullptr;
}

Unit parse_term(const std::string& term) {
  if (const auto* u = find_symbol(term)) return *u;
  for (const auto& p : prefixes) {
    const std::string pre = p.name;
    if (term.size() > pre.size() && term.compare(0, pre.size(), pre) == 0)
      if (const auto* u = find_symbol(term.substr(pre.size()))) return {p.scale * u->scale, u->dim};
  }
  throw std::invalid_argument("unknown unit '" + term + "'");
}

// "a/b/c" read as a / b / c.
Unit parse_unit(const std::string& expr) {
  Unit out{1.0, {}};
  if (expr.empty()) return out;
  std::size_t start = 0;
  bool first = true;
  while (true) {
    const auto slash = expr.find('/', start);
    const std::string term = trim(expr.substr(start, slash == std::string::npos ? slash : slash - start));
    if (term.empty()) throw std::invalid_argument("malformed unit '" + expr + "'");
    const Unit u = (first && term == "1") ? Unit{1.0, {}} : parse_term(term);
    for (std::size_t i = 0; i < out.dim.size(); ++i) out.dim[i] += first ? u.dim[i] : -u.dim[i];
    out.scale = first ? out.scale * u.scale : out.scale / u.scale;
    first = false;
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return out;
}

std::string describe(const Value& v) {
  switch (v.kind) {
    case Value::Kind::String: return "string";
    case Value::Kind::Number: return "number";
    case Value::Kind::Bool: return "boolean";
    case Value::Kind::Array: return "array";
  }
  return "value";
}

class Parser {
 public:
  Parser(const std::string& line, int number, const std::string& origin)
      : s_(line), line_(number), origin_(origin) {}

  Value value() {
    skip_ws();
    if (pos_ >= s_.size()) error("missing value");
    Value v;
    v.line = line_;
    const char c = s_[pos_];
    if (c == '"') {
      v.kind = Value::Kind::String;
      v.text = quoted();
    } else if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::Array;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(value());
        if (v.items.back().kind == Value::Kind::Array) error("nested arrays are not supported");
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          skip_ws();
          if (peek() == ']') {
            ++pos_;
            break;
          }
          continue;
        }
        if (peek() == ']') {
          ++pos_;
          break;
        }
        error("expected ',' or ']' in array");
      }
    } else {
      std::size_t end = pos_;
      while (end < s_.size() && s_[end] != ',' && s_[end] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[end])))
        ++end;
      const std::string tok = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Bool;
        v.boolean = tok == "true";
      } else {
        char* stop = nullptr;
        v.kind = Value::Kind::Number;
        v.number = std::strtod(tok.c_str(), &stop);
        if (tok.empty() || *stop != '\0' || !std::isfinite(v.number))
          error("cannot read '" + tok + "' as a number (quote values that carry units)");
      }
    }
    return v;
  }

  void finish() {
    skip_ws();
    if (pos_ >= s_.size()) return;
    const std::string rest = s_.substr(pos_);
    if (std::isalpha(static_cast<unsigned char>(rest[0])))
      error("unexpected trailing text '" + rest + "' (quote values that carry units)");
    error("unexpected trailing text '" + rest + "'");
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string quoted() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        const char e = s_[++pos_];
        out += e == 'n' ? '\n' : (e == 't' ? '\t' : e);
      } else {
        out += s_[pos_];
      }
      ++pos_;
    }
    if (pos_ >= s_.size()) error("unterminated string");
    ++pos_;
    return out;
  }

  [[noreturn]] void error(const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_) + ": " + msg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_;
  const std::string& origin_;
};

// Drops a '#' comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  return true;
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& unit) {
  const std::string s = trim(text);
  char* stop = nullptr;
  const double x = std::strtod(s.c_str(), &stop);
  if (stop == s.c_str()) throw std::invalid_argument("'" + s + "' does not start with a number");
  if (!std::isfinite(x)) throw std::invalid_argument("'" + s + "' is not finite");
  const Unit given = parse_unit(trim(stop));
  const Unit want = parse_unit(unit);
  if (given.dim != want.dim) {
    const std::string got = trim(stop).empty() ? "no unit" : "unit '" + trim(stop) + "'";
    throw std::invalid_argument(got + " is not compatible with " +
                                (unit.empty() ? std::string("a dimensionless value") : "'" + unit + "'"));
  }
  return x * given.scale / want.scale;
}

Document Document::parse(const std::string& text, const std::string& origin) {
  Document doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(n) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) throw ConfigError(where + "invalid section name '" + section + "'");
      for (const auto& s : doc.sections_)
        if (s == section) throw ConfigError(where + "section [" + section + "] appears twice");
      doc.sections_.push_back(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(where + "invalid key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.values_.count(full))
      throw ConfigError(where + "'" + full + "' already set on line " +
                        std::to_string(doc.values_.at(full).line));
    const std::string rhs = line.substr(eq + 1);
    Parser p(rhs, n, origin);
    Value v = p.value();
    p.finish();
    doc.values_[full] = std::move(v);
  }
  return doc;
}

Document Document::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

bool Document::has_section(const std::string& section) const {
  for (const auto& s : sections_)
    if (s == section) return true;
  return false;
}

const Value& Document::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing required field '" + key + "'");
  used_[key] = true;
  return it->second;
}

void Document::fail(const std::string& key, const std::string& message) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": field '" + key + "': " + message);
  throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": field '" + key + "': " + message);
}

double Document::quantity(const std::string& key, const std::string& unit) const {
  const Value& v = get(key);
  if (v.kind == Value::Kind::Number) return v.number;
  if (v.kind != Value::Kind::String) fail(key, "expected a number or quantity, got " + describe(v));
  try {
    return parse_quantity(v.text, unit);
  } catch (const std::invalid_argument& e) {
    fail(key, e.what());
  }
}

double Document::quantity(const std::string& key, const std::string& unit, double fallback) const {
  return has(key) ? quantity(key, unit) : fallback;
}

std::vector<double> Document::quantities(const std::string& key, const std::string& unit) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::Array) fail(key, "expected an array, got " + describe(v));
  std::vector<double> out;
  for (const auto& item : v.items) {
    if (item.kind == Value::Kind::Number) {
      out.push_back(item.number);
      continue;
    }
    if (item.kind != Value::Kind::String) fail(key, "array items must be numbers or quantities");
    try {
      out.push_back(parse_quantity(item.text, unit));
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }
  return out;
}

std::string Document::string(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::String) fail(key, "expected a string, got " + describe(v));
  return v.text;
}

std::string Document::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

std::vector<std::string> Document::strings(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind == Value::Kind::String) return {v.text};
  if (v.kind != Value::Kind::Array) fail(key, "expected a string array, got " + describe(v));
  std::vector<std::string> out;
  for (const auto& item : v.items) {
    if (item.kind != Value::Kind::String) fail(key, "array items must be strings");
    out.push_back(item.text);
  }
  return out;
}

bool Document::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = get(key);
  if (v.kind != Value::Kind::Bool) fail(key, "expected true or false, got " + describe(v));
  return v.boolean;
}

long long Document::integer(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const Value& v = get(key);
  if (v.kind != Value::Kind::Number || v.number != std::floor(v.number) || std::abs(v.number) > 9e15)
    fail(key, "expected an integer");
  return static_cast<long long>(v.number);
}

void Document::reject_unused() const {
  for (const auto& [key, v] : values_)
    if (!used_.count(key))
      throw ConfigError(origin_ + ":" + std::to_string(v.line) + ": unknown or unused field '" + key + "'");
}

}  // namespace optomech::cli
