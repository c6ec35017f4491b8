#pragma once

#include <string>
#include <string_view>

namespace winsim {

/// Physical dimension expected for a config quantity.
enum class Dimension {
  Dimensionless,
  Time,            // s
  Frequency,       // Hz
  Length,          // m
  Dispersion,      // s/m^2 (ps/(nm km) = 1e-6 s/m^2)
  Attenuation,     // dB/m
  Angle,           // rad
  DelayPerLength,  // s/m
  NoiseDensity,    // V^2/Hz
  Voltage,         // V
  VoltSeconds,     // V s
};

std::string_view dimension_name(Dimension d);

/// Parses "<number> <unit expression>" into SI units of `expected`, e.g.
/// "20 GHz", "17 ps/(nm km)", "0.2 dB/km", "1e-12 V^2/Hz". Units are
/// products of SI-prefixed atoms (s, Hz, m, V, dB, rad) with '/', '*', '.',
/// spaces, parentheses and integer powers '^n'. A bare number is accepted only
/// for Dimensionless. Throws ConfigError on malformed input, unknown units or
/// a dimension mismatch.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace winsim
