#include "winsim/multicoset_frontend.hpp"

#include <cmath>
#include <complex>

#include "detail/fft.hpp"
#include "winsim/errors.hpp"
#include "winsim/rng.hpp"

namespace winsim {

MulticosetConfig MulticosetConfig::uniform(int channels, double nyquist_period) {
  MulticosetConfig cfg;
  cfg.channels = channels;
  cfg.nyquist_period = nyquist_period;
  cfg.delays.resize(static_cast<std::size_t>(std::max(channels, 0)));
  for (int i = 0; i < channels; ++i) cfg.delays[static_cast<std::size_t>(i)] = i * nyquist_period;
  return cfg;
}

void MulticosetConfig::validate() const {
  if (channels < 1) throw ArgumentError("multicoset needs at least one channel");
  if (!(nyquist_period > 0.0)) throw ArgumentError("Nyquist period must be positive");
  if (delays.size() != static_cast<std::size_t>(channels)) throw ArgumentError("need one delay per channel");
  if (lpf_bandwidth && !(*lpf_bandwidth > 0.0)) throw ArgumentError("LPF bandwidth must be positive");
  if (noise_bandwidth && !(*noise_bandwidth > 0.0)) throw ArgumentError("noise bandwidth must be positive");
}

double MulticosetConfig::effective_noise_bandwidth(double grid_dt) const {
  if (noise_bandwidth) return *noise_bandwidth;
  if (lpf_bandwidth) return 2.0 * *lpf_bandwidth;
  return 1.0 / grid_dt;
}

double multicoset_default_range(int bits_per_symbol) { return std::ldexp(1.0, bits_per_symbol); }

DenseWaveform lowpass(const DenseWaveform& x, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ArgumentError("LPF bandwidth must be positive");
  const std::size_t pad = 16 * static_cast<std::size_t>(x.osr);
  const std::size_t n = detail::fast_fft_size(x.size() + 2 * pad, 1);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < x.size(); ++i) buf[pad + i] = x.samples[i];
  detail::fft_forward(buf);
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(detail::bin_frequency(k, n, x.dt)) > bandwidth) buf[k] = 0.0;
  detail::fft_inverse(buf);
  DenseWaveform out = x;
  out.quadrature.clear();
  for (std::size_t i = 0; i < x.size(); ++i) out.samples[i] = buf[pad + i].real();
  return out;
}

SampleFrames sample_multicoset(const DenseWaveform& x, const MulticosetConfig& cfg, const ClockRealization& clock,
                               const NoiseSpec& noise, const std::optional<QuantizerSpec>& quant) {
  cfg.validate();
  noise.validate();
  if (quant) quant->validate();
  const int M = cfg.channels;
  const double T = cfg.nyquist_period;
  if (x.osr < 8) throw ArgumentError("multicoset sampling needs an oversampling ratio >= 8");
  if (clock.size() < static_cast<std::size_t>(M) + 1 || (clock.size() - 1) % static_cast<std::size_t>(M) != 0)
    throw ArgumentError("clock must provide N*M + 1 edges for N whole frames");
  if (std::abs(clock.nominal_period - T) > 1e-9 * T) throw ArgumentError("clock period differs from Nyquist period");
  const auto frames = static_cast<long>((clock.size() - 1) / static_cast<std::size_t>(M));

  const DenseWaveform filtered = cfg.lpf_bandwidth ? lowpass(x, *cfg.lpf_bandwidth) : DenseWaveform{};
  const DenseWaveform& src = cfg.lpf_bandwidth ? filtered : x;

  // Catmull-Rom needs one neighbour on each side of the bracketing cells.
  const double lo_ok = x.t0 + 1.5 * x.dt;
  const double hi_ok = x.end_time() - 1.5 * x.dt;
  const double sigma = std::sqrt(noise.n0 * cfg.effective_noise_bandwidth(x.dt));
  const double frame_period = cfg.frame_period();

  SampleFrames out;
  out.frame_period = frame_period;
  out.y.resize(M, frames);
  std::size_t overloads = 0;
  bool outside = false;

#pragma omp parallel for schedule(static) reduction(+ : overloads) reduction(|| : outside)
  for (long f = 0; f < frames; ++f) {
    Rng rng(derive_seed(noise.seed, {static_cast<std::uint64_t>(f)}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < M; ++i) {
      const std::size_t k = static_cast<std::size_t>(f) * static_cast<std::size_t>(M) + static_cast<std::size_t>(i);
      const double t = clock.origin + static_cast<double>(f) * frame_period + cfg.delays[static_cast<std::size_t>(i)] +
                       cfg.sampling_phase * T + clock.offset(k);
      if (t < lo_ok || t > hi_ok) {
        outside = true;
        continue;
      }
      double v = src.interpolate(t);
      if (sigma > 0.0) v += sigma * gauss(rng);
      if (quant) {
        if (is_overload(v, *quant)) ++overloads;
        v = quantize(v, *quant);
      }
      out.y(i, f) = v;
    }
  }
  if (outside) throw ArgumentError("multicoset sampling instant outside the waveform");
  out.overload_count = overloads;
  return out;
}

std::vector<double> interleave(const SampleFrames& frames) {
  const int M = frames.channels();
  const int N = frames.frames();
  std::vector<double> s(static_cast<std::size_t>(M) * static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < M; ++i) s[static_cast<std::size_t>(n) * M + i] = frames.y(i, n);
  return s;
}

}  // namespace winsim
