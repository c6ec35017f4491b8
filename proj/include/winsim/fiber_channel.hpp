#pragma once

#include <complex>

#include "winsim/waveform.hpp"

namespace winsim {

/// Whether the sampled electrical signal follows the optical field
/// (amplitude factor 10^{-alpha L0 / 20}) or the intensity (10^{-alpha L0 / 10}).
enum class AttenuationMode { Field, Intensity };

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

struct FiberParams {
  double length_km = 0.0;
  double attenuation_db_per_km = 0.0;
  double dispersion_ps_per_nm_km = 17.0;
  double wavelength_nm = 1550.0;
  double beta0 = 0.0;          // rad
  double beta1_s_per_km = 0.0;  // phase slope of the linear term, s/km
  AttenuationMode attenuation_mode = AttenuationMode::Field;

  void validate() const;
  /// beta2 = 2 pi lambda^2 D / c, in s^2/km.
  double beta2() const;
  /// Amplitude factor applied to the sampled signal.
  double amplitude_factor() const;
  /// Quadratic spectral phase coefficient: H(f) contains exp(j a f^2), f in Hz.
  double quadratic_phase() const { return 0.5 * length_km * beta2(); }
};

/// Multiplies the spectrum by exp(j beta0) exp(j L0 beta1 f) exp(j L0 beta2/2 f^2),
/// f in Hz, times the attenuation factor. The waveform is zero-padded on both
/// sides (by 8 symbol periods plus the group-delay spread of the grid band
/// edge, capped), and the padded span is kept in the output so no energy is
/// truncated. The result is real when the imaginary residue is below 1e-6
/// relative; otherwise `quadrature` carries the imaginary part.
DenseWaveform apply_channel(const DenseWaveform& x, const FiberParams& params);

/// Received pulse for a transmitted exp(-t^2/(2 T0^2)):
/// (T0/delta) exp(-t^2/(2 delta^2)), delta^2 = T0^2 - j (lambda^2/c) D L0 / (2 pi),
/// including the beta0 phase, the beta1 delay and the attenuation factor.
std::complex<double> dispersed_gaussian(double width, const FiberParams& params, double t);

}  // namespace winsim
