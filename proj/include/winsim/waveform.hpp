#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace winsim {

/// PAM symbols stored as level indices 0 .. 2^B_in - 1. Index j maps to the
/// amplitude -2^{B_in-1} + j * 2^{B_in} / (2^{B_in} - 1), i.e. 2^{B_in}
/// equispaced levels spanning [-2^{B_in-1}, 2^{B_in-1}].
struct SymbolStream {
  std::vector<int> levels;
  int bits_per_symbol = 1;
  double symbol_period = 0.0;

  std::size_t size() const noexcept { return levels.size(); }
  double amplitude(std::size_t k) const;
  std::vector<double> amplitudes() const;
};

int level_count(int bits_per_symbol);
double level_amplitude(int level, int bits_per_symbol);
double level_spacing(int bits_per_symbol);
/// Mean square of the level set (uniform symbols).
double level_power(int bits_per_symbol);
/// Nearest level index; an exact midpoint goes to the lower level.
int nearest_level(double value, int bits_per_symbol);

SymbolStream generate_symbols(std::size_t count, int bits_per_symbol, double symbol_period,
                              std::uint64_t seed);

enum class PulseKind { Rectangular, Led, Gaussian, Laser };

/// Transmit pulse g_T. `value(t)` is placed relative to the start of the
/// symbol slot [0, T) and includes the normalization that makes the integral
/// over the slot equal to T. Gaussian pulses are centered at T/2.
class PulseShape {
public:
  static PulseShape rectangular(double symbol_period);
  static PulseShape led(double symbol_period, double time_constant);
  /// Pulse width T0 of exp(-t^2 / (2 T0^2)).
  static PulseShape gaussian(double symbol_period, double width);
  static double gaussian_width_from_fwhm(double fwhm);
  /// Laser pulse given as samples of g at t = i * table_step, i >= 0,
  /// linearly interpolated and zero outside the table.
  static PulseShape laser(double symbol_period, std::vector<double> table, double table_step);

  PulseKind kind() const noexcept { return kind_; }
  double symbol_period() const noexcept { return period_; }
  /// tau for LED, T0 for Gaussian, 0 otherwise.
  double parameter() const noexcept { return param_; }
  double normalization() const noexcept { return norm_; }
  /// Offset of the formula origin inside the slot (T/2 for Gaussian).
  double center_offset() const noexcept;

  /// Raw pulse formula at formula time t, before normalization.
  double raw(double t) const;
  /// Normalized pulse at time t relative to the slot start.
  double value(double t) const { return norm_ * raw(t - center_offset()); }

  /// Support [lo, hi] relative to the slot start outside which
  /// |g| < 1e-9 max|g|.
  double support_begin() const;
  double support_end() const;

  /// Largest |g(c + nT)| / |g(c)|, n != 0, where c is the mid-slot sampling
  /// instant. Zero means the ISI-free Nyquist condition holds.
  double nyquist_isi() const;

private:
  PulseShape(PulseKind kind, double period, double param);
  void finalize();

  PulseKind kind_;
  double period_;
  double param_;
  double norm_ = 1.0;
  std::vector<double> table_;
  double table_step_ = 0.0;
};

/// Evaluates the raw pulse formula (rectangular 1 on [0,T), LED rise/decay,
/// Gaussian centered at 0, laser table).
double eval_pulse(const PulseShape& shape, double t);

/// Uniformly oversampled waveform. Sample i holds the value at the center of
/// cell [t0 + i dt, t0 + (i+1) dt); symbol boundaries kT fall on cell
/// boundaries. `quadrature` is empty for real waveforms.
struct DenseWaveform {
  std::vector<double> samples;
  std::vector<double> quadrature;
  int osr = 32;
  double t0 = 0.0;
  double dt = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  bool is_complex() const noexcept { return !quadrature.empty(); }
  double symbol_period() const noexcept { return dt * osr; }
  double cell_center(std::size_t i) const noexcept { return t0 + (static_cast<double>(i) + 0.5) * dt; }
  double end_time() const noexcept { return t0 + static_cast<double>(samples.size()) * dt; }
  /// Catmull-Rom interpolation of the in-phase samples at time t.
  double interpolate(double t) const;
  double energy() const;
};

/// Superposition of shifted pulses with real amplitudes (linear in the
/// amplitudes). Parallel kernel; see reference::render_amplitudes.
DenseWaveform render_amplitudes(std::span<const double> amplitudes, const PulseShape& shape, int osr);

DenseWaveform render_pam(const SymbolStream& stream, const PulseShape& shape, int osr);

}  // namespace winsim
