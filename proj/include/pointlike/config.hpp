#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pointlike/errors.hpp"

namespace pointlike {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal form that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

enum class ValueType { Real, Integer, Text, Choice, RealList, IntegerList };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string default_value;
  std::string help;
  std::vector<std::string> choices = {};
};

/// Every recognised configuration key. Keys are flat with a section prefix.
inline const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema{
      {"model.kind", ValueType::Choice, "boson", "interaction kind", {"boson", "fermion"}},
      {"model.c", ValueType::Real, "1", "coupling c"},
      {"model.nu", ValueType::Real, "1", "energy-dependence parameter nu"},
      {"model.a", ValueType::Real, "0.01", "regularization range a"},
      {"model.L", ValueType::Real, "1", "ring length (inf for the line)"},
      {"potential.x_min", ValueType::Real, "-0.1", "left end of the sampling grid"},
      {"potential.x_max", ValueType::Real, "0.1", "right end of the sampling grid"},
      {"potential.points", ValueType::Integer, "2001", "number of grid points"},
      {"converge.a_list", ValueType::RealList, "0.01,0.003,0.001", "decreasing ranges"},
      {"converge.E", ValueType::Real, "4", "energy of the jump measurement"},
      {"spectrum.count", ValueType::Integer, "30", "modes per sector"},
      {"spectrum.parity", ValueType::Choice, "interacting", "sectors", {"interacting", "even", "odd", "both"}},
      {"evolve.t_min", ValueType::Real, "0", "first time"},
      {"evolve.t_max", ValueType::Real, "0.2", "last time"},
      {"evolve.points", ValueType::Integer, "201", "number of times"},
      {"evolve.spacing", ValueType::Choice, "linear", "time grid spacing", {"linear", "log"}},
      {"evolve.deficit_target", ValueType::Real, "0.001", "finite ring: allowed missing weight"},
      {"evolve.max_modes", ValueType::Integer, "10000", "finite ring: mode budget"},
      {"evolve.rel_tol", ValueType::Real, "1e-10", "line: quadrature tolerance"},
      {"evolve.profile_out", ValueType::Text, "", "optional x,re_psi,im_psi output file"},
      {"evolve.profile_t", ValueType::Real, "0.05", "time of the profile"},
      {"evolve.profile_x_max", ValueType::Real, "0.5", "profile covers [-x_max, x_max]"},
      {"evolve.profile_points", ValueType::Integer, "201", "profile sample count"},
      {"chain.envelope", ValueType::Choice, "cosine", "envelope family", {"const", "cosine", "file"}},
      {"chain.value", ValueType::Real, "1", "const envelope value"},
      {"chain.offset", ValueType::Real, "1", "cosine envelope offset"},
      {"chain.amplitude", ValueType::Real, "1", "cosine envelope amplitude"},
      {"chain.file", ValueType::Text, "", "two-column (x, V) sample file"},
      {"chain.N_list", ValueType::IntegerList, "16,32,64,128", "increasing site counts"},
      {"chain.count", ValueType::Integer, "5", "levels compared"},
      {"chain.twist", ValueType::Real, "0", "Bloch phase of the ring condition"},
      {"duality.count", ValueType::Integer, "10", "modes checked"},
  };
  return schema;
}

inline const KeySpec& key_spec(const std::string& key) {
  const auto& s = config_schema();
  const auto it = std::find_if(s.begin(), s.end(), [&](const KeySpec& k) { return k.key == key; });
  if (it == s.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return *it;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, std::string_view s) {
  double v = 0.0;
  const auto t = trim(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || std::isnan(v)) {
    throw ConfigError(key + ": '" + std::string(s) + "' is not a real number");
  }
  return v;
}

inline long long parse_integer(const std::string& key, std::string_view s) {
  long long v = 0;
  const auto t = trim(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || v < 0) {
    throw ConfigError(key + ": '" + std::string(s) + "' is not a nonnegative integer");
  }
  return v;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Validates a value and returns its canonical spelling.
inline std::string canonical(const KeySpec& spec, std::string_view value) {
  switch (spec.type) {
    case ValueType::Real:
      return format_real(parse_real(spec.key, value));
    case ValueType::Integer:
      return std::to_string(parse_integer(spec.key, value));
    case ValueType::Text:
      return trim(value);
    case ValueType::Choice: {
      const auto v = trim(value);
      if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
        throw ConfigError(spec.key + ": '" + v + "' is not one of " + allowed);
      }
      return v;
    }
    case ValueType::RealList:
    case ValueType::IntegerList: {
      std::string out;
      for (const auto& item : split_list(value)) {
        out += out.empty() ? "" : ",";
        out += spec.type == ValueType::RealList ? format_real(parse_real(spec.key, item))
                                                : std::to_string(parse_integer(spec.key, item));
      }
      return out;
    }
  }
  return {};
}

}  // namespace detail

/// Complete, validated parameter set of one experiment.
class ExperimentConfig {
 public:
  ExperimentConfig() {
    for (const auto& k : config_schema()) values_[k.key] = k.default_value;
  }

  std::string command;

  void set(const std::string& key, std::string_view value) {
    values_[key] = detail::canonical(key_spec(key), value);
  }

  const std::string& raw(const std::string& key) const {
    key_spec(key);
    return values_.at(key);
  }

  double real(const std::string& key) const { return detail::parse_real(key, raw(key)); }

  std::size_t integer(const std::string& key) const {
    return static_cast<std::size_t>(detail::parse_integer(key, raw(key)));
  }

  const std::string& text(const std::string& key) const { return raw(key); }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : detail::split_list(raw(key))) out.push_back(detail::parse_real(key, s));
    return out;
  }

  std::vector<std::size_t> integers(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& s : detail::split_list(raw(key))) {
      out.push_back(static_cast<std::size_t>(detail::parse_integer(key, s)));
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  /// One `key = value` line per key, `command` first when set.
  std::string to_text() const {
    std::ostringstream os;
    if (!command.empty()) os << "command = " << command << '\n';
    for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
    return os.str();
  }

  /// Parses `key = value` lines; '#' starts a comment. Unknown keys, missing
  /// '=' and invalid values raise ConfigError naming the line.
  static ExperimentConfig parse(std::string_view text) {
    ExperimentConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (detail::trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      const auto key = detail::trim(std::string_view(line).substr(0, eq));
      const auto value = std::string_view(line).substr(eq + 1);
      try {
        if (key == "command") {
          cfg.command = detail::trim(value);
        } else {
          cfg.set(key, value);
        }
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    return cfg;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  bool operator==(const ExperimentConfig&) const = default;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pointlike
