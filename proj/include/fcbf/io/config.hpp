#pragma once
// Flat "key = value" text used for scenario files and for every report the
// tools write. Keys are the dotted ScenarioConfig field names; '#' starts a
// comment. Scalars accept small arithmetic expressions such as "pi/12" or
// "-5*1650"; two-element fields take "a, b".

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcbf/errors.hpp"
#include "fcbf/sim.hpp"

namespace fcbf::io {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) { return fmt::format("{:.17g}", v); }

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// ---------------------------------------------------------------------------
// Key/value documents

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Ordered key/value list; duplicate keys and malformed lines are errors.
inline std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    KeyValue kv{trim(std::string_view(line).substr(0, eq)),
                trim(std::string_view(line).substr(eq + 1)), line_no};
    if (kv.key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    if (kv.value.empty()) throw ConfigError(fmt::format("line {}: empty value for '{}'", line_no, kv.key));
    if (!seen.insert(kv.key).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, kv.key));
    }
    out.push_back(std::move(kv));
  }
  return out;
}

/// Writer for the same format; values are emitted verbatim.
class KeyValueWriter {
 public:
  KeyValueWriter& comment(std::string_view text) {
    out_ << "# " << text << '\n';
    return *this;
  }
  KeyValueWriter& blank() {
    out_ << '\n';
    return *this;
  }
  KeyValueWriter& put(std::string_view key, std::string_view value) {
    out_ << key << " = " << value << '\n';
    return *this;
  }
  KeyValueWriter& put(std::string_view key, double value) { return put(key, format_double(value)); }
  KeyValueWriter& put(std::string_view key, int value) { return put(key, std::to_string(value)); }
  // Without this overload a string literal would convert to bool.
  KeyValueWriter& put(std::string_view key, const char* value) { return put(key, std::string_view(value)); }
  KeyValueWriter& put(std::string_view key, bool value) { return put(key, value ? "true" : "false"); }
  KeyValueWriter& put(std::string_view key, const Vec2& v) {
    return put(key, format_double(v[0]) + ", " + format_double(v[1]));
  }
  /// Append lines already rendered by another writer.
  KeyValueWriter& append(std::string_view rendered) {
    out_ << rendered;
    return *this;
  }
  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// Scalar expressions

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot parse number '" + std::string(s_) + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    while (true) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = unary();
    while (true) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }
  double primary() {
    skip();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const auto* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
};

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    parts.push_back(trim(s.substr(start, p == std::string_view::npos ? s.npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return parts;
}

}  // namespace detail

inline double parse_number(std::string_view s) { return detail::ExprParser(s).parse(); }

/// Comma-separated list of scalar expressions.
inline std::vector<double> parse_number_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& part : detail::split(s, ',')) {
    if (part.empty()) throw ConfigError("empty entry in list '" + std::string(s) + "'");
    out.push_back(parse_number(part));
  }
  return out;
}

inline Vec2 parse_pair(std::string_view s) {
  const auto v = parse_number_list(s);
  if (v.size() != 2) throw ConfigError("expected two comma-separated values, got '" + std::string(s) + "'");
  return {v[0], v[1]};
}

inline ControllerKind parse_controller(std::string_view s) {
  if (s == "fcbf") return ControllerKind::FCBF;
  if (s == "hocbf") return ControllerKind::HOCBF;
  if (s == "sp-hocbf") return ControllerKind::SpHOCBF;
  throw ConfigError("unknown controller '" + std::string(s) + "' (expected fcbf, hocbf or sp-hocbf)");
}

// ---------------------------------------------------------------------------
// Scenario files

namespace detail {

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

inline const std::vector<std::pair<std::string, Setter>>& config_fields() {
  static const std::vector<std::pair<std::string, Setter>> fields = {
      {"dt", [](auto& c, const auto& v) { c.dt = parse_number(v); }},
      {"horizon_T", [](auto& c, const auto& v) { c.horizon_T = parse_number(v); }},
      {"initial_state.x", [](auto& c, const auto& v) { c.initial_state.x = parse_number(v); }},
      {"initial_state.y", [](auto& c, const auto& v) { c.initial_state.y = parse_number(v); }},
      {"initial_state.theta", [](auto& c, const auto& v) { c.initial_state.theta = parse_number(v); }},
      {"initial_state.v", [](auto& c, const auto& v) { c.initial_state.v = parse_number(v); }},
      {"initial_uf.uf1", [](auto& c, const auto& v) { c.initial_uf.uf1 = parse_number(v); }},
      {"initial_uf.uf2", [](auto& c, const auto& v) { c.initial_uf.uf2 = parse_number(v); }},
      {"controller", [](auto& c, const auto& v) { c.controller = parse_controller(v); }},
      {"gains.k1", [](auto& c, const auto& v) { c.gains.k1.gain = parse_number(v); }},
      {"gains.k2", [](auto& c, const auto& v) { c.gains.k2.gain = parse_number(v); }},
      {"gains.k3", [](auto& c, const auto& v) { c.gains.k3.gain = parse_number(v); }},
      {"gains.alpha", [](auto& c, const auto& v) { c.gains.alpha.gain = parse_number(v); }},
      {"gains.c3", [](auto& c, const auto& v) { c.gains.c3 = parse_number(v); }},
      {"qp.Q", [](auto& c, const auto& v) { c.qp.Q = parse_number(v); }},
      {"qp.smoothness_weight", [](auto& c, const auto& v) { c.qp.smoothness_weight = parse_number(v); }},
      {"filter.tau", [](auto& c, const auto& v) { c.filter.tau = parse_number(v); }},
      {"filter.order_ma",
       [](auto& c, const auto& v) {
         const double d = parse_number(v);
         if (d != std::floor(d)) throw ConfigError("filter.order_ma must be an integer");
         c.filter.order_ma = static_cast<int>(d);
       }},
      {"unicycle.mass_M", [](auto& c, const auto& v) { c.unicycle.mass_M = parse_number(v); }},
      {"unicycle.obstacle_x", [](auto& c, const auto& v) { c.unicycle.obstacle_x = parse_number(v); }},
      {"unicycle.obstacle_y", [](auto& c, const auto& v) { c.unicycle.obstacle_y = parse_number(v); }},
      {"unicycle.obstacle_r", [](auto& c, const auto& v) { c.unicycle.obstacle_r = parse_number(v); }},
      {"unicycle.goal_x", [](auto& c, const auto& v) { c.unicycle.goal_x = parse_number(v); }},
      {"unicycle.goal_y", [](auto& c, const auto& v) { c.unicycle.goal_y = parse_number(v); }},
      {"unicycle.goal_tol_rd", [](auto& c, const auto& v) { c.unicycle.goal_tol_rd = parse_number(v); }},
      {"input_bounds.u_min", [](auto& c, const auto& v) { c.input_bounds.u_min = parse_pair(v); }},
      {"input_bounds.u_max", [](auto& c, const auto& v) { c.input_bounds.u_max = parse_pair(v); }},
  };
  return fields;
}

}  // namespace detail

/// Parse a scenario. Keys not listed keep their defaults; unknown keys, bad
/// numbers and invalid values raise ConfigError.
inline ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, const detail::Setter*> by_key;
  for (const auto& [k, f] : detail::config_fields()) by_key.emplace(k, &f);
  ScenarioConfig c;
  for (const auto& kv : parse_key_values(text)) {
    const auto it = by_key.find(kv.key);
    if (it == by_key.end()) throw ConfigError(fmt::format("line {}: unknown key '{}'", kv.line, kv.key));
    try {
      (*it->second)(c, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", kv.line, e.what()));
    }
  }
  c.validate();
  return c;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ScenarioConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

/// Every field, in the order the parser lists them; parse_config of the result
/// reproduces the config exactly.
inline std::string write_config(const ScenarioConfig& c) {
  KeyValueWriter w;
  w.put("dt", c.dt)
      .put("horizon_T", c.horizon_T)
      .put("initial_state.x", c.initial_state.x)
      .put("initial_state.y", c.initial_state.y)
      .put("initial_state.theta", c.initial_state.theta)
      .put("initial_state.v", c.initial_state.v)
      .put("initial_uf.uf1", c.initial_uf.uf1)
      .put("initial_uf.uf2", c.initial_uf.uf2)
      .put("controller", to_string(c.controller))
      .put("gains.k1", c.gains.k1.gain)
      .put("gains.k2", c.gains.k2.gain)
      .put("gains.k3", c.gains.k3.gain)
      .put("gains.alpha", c.gains.alpha.gain)
      .put("gains.c3", c.gains.c3)
      .put("qp.Q", c.qp.Q)
      .put("qp.smoothness_weight", c.qp.smoothness_weight)
      .put("filter.tau", c.filter.tau)
      .put("filter.order_ma", c.filter.order_ma)
      .put("unicycle.mass_M", c.unicycle.mass_M)
      .put("unicycle.obstacle_x", c.unicycle.obstacle_x)
      .put("unicycle.obstacle_y", c.unicycle.obstacle_y)
      .put("unicycle.obstacle_r", c.unicycle.obstacle_r)
      .put("unicycle.goal_x", c.unicycle.goal_x)
      .put("unicycle.goal_y", c.unicycle.goal_y)
      .put("unicycle.goal_tol_rd", c.unicycle.goal_tol_rd)
      .put("input_bounds.u_min", c.input_bounds.u_min)
      .put("input_bounds.u_max", c.input_bounds.u_max);
  return w.str();
}

}  // namespace fcbf::io
