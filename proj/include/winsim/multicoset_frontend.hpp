#pragma once

#include <optional>
#include <vector>

#include "winsim/impairments.hpp"
#include "winsim/waveform.hpp"
#include "winsim/window_frontend.hpp"

namespace winsim {

/// Interleaved-ADC baseline: M pointwise samplers at rate 1/(M T), channel i
/// delayed by delays[i] (nominally i T).
struct MulticosetConfig {
  int channels = 8;
  double nyquist_period = 0.0;
  std::vector<double> delays;
  /// Sampling instant inside each Nyquist interval, as a fraction of T.
  double sampling_phase = 0.5;
  /// Ideal brick-wall anti-aliasing filter |f| <= b applied before sampling.
  std::optional<double> lpf_bandwidth;
  /// Noise-equivalent bandwidth B of each sampler; per-sample thermal
  /// variance is n0 * B. Unset: 2b with the LPF, else the grid rate 1/dt
  /// (pointwise sampling of the simulated white noise).
  std::optional<double> noise_bandwidth;

  static MulticosetConfig uniform(int channels, double nyquist_period);
  void validate() const;
  double frame_period() const noexcept { return channels * nyquist_period; }
  double effective_noise_bandwidth(double grid_dt) const;
};

/// y(i, n) = x(n M T + delays[i] + phase T + jitter offset of clock edge nM+i)
/// + N(0, n0 B), then optional quantization. Off-grid instants use Catmull-Rom
/// interpolation of the (optionally low-pass filtered) waveform. The clock
/// must have N M + 1 edges; its origin is the start of frame 0.
SampleFrames sample_multicoset(const DenseWaveform& x, const MulticosetConfig& cfg, const ClockRealization& clock,
                               const NoiseSpec& noise, const std::optional<QuantizerSpec>& quant);

/// s[n M + i] = y(i, n).
std::vector<double> interleave(const SampleFrames& frames);

/// Ideal low-pass filter |f| <= bandwidth on the in-phase samples (FFT,
/// zero-padded by 16 symbol periods each side, same span as the input).
DenseWaveform lowpass(const DenseWaveform& x, double bandwidth);

/// Dynamic range 2^{B_in} of a pointwise sampler.
double multicoset_default_range(int bits_per_symbol);

}  // namespace winsim
