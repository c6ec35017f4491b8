#include "winsim/units.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "winsim/errors.hpp"

namespace winsim {

namespace {

// Exponents of (s, m, V, dB, rad).
using Dims = std::array<int, 5>;

struct Unit {
  double scale = 1.0;
  Dims dims{};
};

Dims expected_dims(Dimension d) {
  switch (d) {
    case Dimension::Dimensionless: return {0, 0, 0, 0, 0};
    case Dimension::Time: return {1, 0, 0, 0, 0};
    case Dimension::Frequency: return {-1, 0, 0, 0, 0};
    case Dimension::Length: return {0, 1, 0, 0, 0};
    case Dimension::Dispersion: return {1, -2, 0, 0, 0};
    case Dimension::Attenuation: return {0, -1, 0, 1, 0};
    case Dimension::Angle: return {0, 0, 0, 0, 1};
    case Dimension::DelayPerLength: return {1, -1, 0, 0, 0};
    case Dimension::NoiseDensity: return {1, 0, 2, 0, 0};
    case Dimension::Voltage: return {0, 0, 1, 0, 0};
    case Dimension::VoltSeconds: return {1, 0, 1, 0, 0};
  }
  return {};
}

bool base_unit(std::string_view name, Unit& u) {
  if (name == "s") u = {1.0, {1, 0, 0, 0, 0}};
  else if (name == "Hz") u = {1.0, {-1, 0, 0, 0, 0}};
  else if (name == "m") u = {1.0, {0, 1, 0, 0, 0}};
  else if (name == "V") u = {1.0, {0, 0, 1, 0, 0}};
  else if (name == "dB") u = {1.0, {0, 0, 0, 1, 0}};
  else if (name == "rad") u = {1.0, {0, 0, 0, 0, 1}};
  else return false;
  return true;
}

bool prefix_scale(std::string_view p, double& scale) {
  static constexpr std::pair<std::string_view, double> table[] = {
      {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"\xC2\xB5", 1e-6}, {"m", 1e-3},
      {"c", 1e-2},  {"k", 1e3},   {"M", 1e6},  {"G", 1e9},  {"T", 1e12}};
  for (const auto& [name, s] : table)
    if (p == name) {
      scale = s;
      return true;
    }
  return false;
}

Unit atom_unit(std::string_view atom, std::string_view full) {
  Unit u;
  if (base_unit(atom, u)) return u;
  for (std::size_t plen = 1; plen <= 2 && plen < atom.size(); ++plen) {
    double scale = 0.0;
    if (prefix_scale(atom.substr(0, plen), scale) && base_unit(atom.substr(plen), u)) {
      u.scale *= scale;
      return u;
    }
  }
  throw ConfigError("unknown unit '" + std::string(atom) + "' in '" + std::string(full) + "'");
}

bool atom_char(unsigned char c) { return std::isalpha(c) || c >= 0x80; }

// Recursive descent over  expr := term (('/' | '*' | '.' | ' ') term)*,
// term := atom ['^' int] | '(' expr ')'.
class UnitParser {
public:
  explicit UnitParser(std::string_view text) : s_(text) {}

  Unit parse() {
    Unit u = expr();
    skip_space();
    if (pos_ != s_.size()) fail();
    return u;
  }

private:
  void skip_space() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail() const { throw ConfigError("malformed unit expression '" + std::string(s_) + "'"); }

  static void combine(Unit& acc, const Unit& u, int sign) {
    acc.scale *= std::pow(u.scale, sign);
    for (std::size_t i = 0; i < acc.dims.size(); ++i) acc.dims[i] += sign * u.dims[i];
  }

  Unit expr() {
    Unit acc;
    combine(acc, term(), 1);
    while (true) {
      skip_space();
      if (pos_ >= s_.size() || s_[pos_] == ')') return acc;
      int sign = 1;
      if (s_[pos_] == '/') {
        sign = -1;
        ++pos_;
      } else if (s_[pos_] == '*' || s_[pos_] == '.') {
        ++pos_;
      } else if (s_.substr(pos_, 2) == "\xC2\xB7") {
        pos_ += 2;
      }
      combine(acc, term(), sign);
    }
  }

  Unit term() {
    skip_space();
    if (pos_ >= s_.size()) fail();
    Unit u;
    if (s_[pos_] == '(') {
      ++pos_;
      u = expr();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail();
      ++pos_;
    } else {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && atom_char(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) fail();
      u = atom_unit(s_.substr(start, pos_ - start), s_);
    }
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      const std::size_t start = pos_;
      if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) fail();
      const int p = std::stoi(std::string(s_.substr(start, pos_ - start)));
      Unit r;
      combine(r, u, p);
      u = r;
    }
    return u;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Dimensionless: return "dimensionless";
    case Dimension::Time: return "time";
    case Dimension::Frequency: return "frequency";
    case Dimension::Length: return "length";
    case Dimension::Dispersion: return "dispersion (time per wavelength per length)";
    case Dimension::Attenuation: return "attenuation (dB per length)";
    case Dimension::Angle: return "angle";
    case Dimension::DelayPerLength: return "delay per length";
    case Dimension::NoiseDensity: return "noise density (V^2/Hz)";
    case Dimension::Voltage: return "voltage";
    case Dimension::VoltSeconds: return "voltage-time";
  }
  return "unknown";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const std::string s(trim(text));
  if (s.empty()) throw ConfigError("empty quantity");
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ConfigError("quantity '" + s + "' does not start with a number");
  const std::string_view unit_text = trim(std::string_view(end));
  if (unit_text.empty()) {
    if (expected == Dimension::Dimensionless) return value;
    throw ConfigError("quantity '" + s + "' is missing a unit (expected " + std::string(dimension_name(expected)) +
                      ")");
  }
  const Unit u = UnitParser(unit_text).parse();
  if (u.dims != expected_dims(expected))
    throw ConfigError("unit mismatch: '" + s + "' is not a " + std::string(dimension_name(expected)));
  return value * u.scale;
}

}  // namespace winsim
