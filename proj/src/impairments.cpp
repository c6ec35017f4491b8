#include "winsim/impairments.hpp"

#include <algorithm>
#include <cmath>

#include "winsim/errors.hpp"
#include "winsim/rng.hpp"

namespace winsim {

namespace {
constexpr std::size_t kNoiseChunk = 4096;
}

void NoiseSpec::validate() const {
  if (!(n0 >= 0.0)) throw ArgumentError("noise spectral density must be >= 0");
}

double QuantizerSpec::step() const { return range / std::ldexp(1.0, bits); }

void QuantizerSpec::validate() const {
  if (bits < 1 || bits > 52) throw ArgumentError("quantizer bits must be in [1, 52]");
  if (!(range > 0.0)) throw ArgumentError("quantizer range must be positive");
}

double quantize(double v, const QuantizerSpec& spec) {
  const double q = spec.step();
  double k = std::floor(v / q);
  if (spec.overload == Overload::Saturate) {
    const double top = std::ldexp(1.0, spec.bits - 1);
    k = std::clamp(k, -top, top - 1.0);
  }
  return (k + 0.5) * q;
}

bool is_overload(double v, const QuantizerSpec& spec) { return std::abs(v) > 0.5 * spec.range; }

void grid_noise(std::uint64_t seed, std::size_t first, double sigma, std::span<double> out) {
  if (out.empty()) return;
  const std::size_t last = first + out.size();
  const std::size_t c0 = first / kNoiseChunk;
  const std::size_t c1 = (last - 1) / kNoiseChunk;
  for (std::size_t c = c0; c <= c1; ++c) {
    Rng rng(derive_seed(seed, {c}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t begin = c * kNoiseChunk;
    const std::size_t lo = std::max(begin, first);
    const std::size_t hi = std::min(begin + kNoiseChunk, last);
    for (std::size_t i = begin; i < lo; ++i) (void)gauss(rng);
    for (std::size_t i = lo; i < hi; ++i) out[i - first] = sigma * gauss(rng);
  }
}

DenseWaveform add_thermal_noise(const DenseWaveform& x, const NoiseSpec& spec) {
  spec.validate();
  DenseWaveform out = x;
  if (spec.n0 == 0.0) return out;
  const double sigma = std::sqrt(spec.n0 / x.dt);
  const std::size_t n = x.size();
  const std::size_t chunks = (n + kNoiseChunk - 1) / kNoiseChunk;
  std::vector<double> noise(n);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kNoiseChunk;
    const std::size_t hi = std::min(lo + kNoiseChunk, n);
    grid_noise(spec.seed, lo, sigma, std::span<double>(noise).subspan(lo, hi - lo));
  }
  for (std::size_t i = 0; i < n; ++i) out.samples[i] += noise[i];
  return out;
}

ClockRealization realize_clock(std::size_t count, double nominal_period, double frame_period,
                               double rms_fraction, std::uint64_t seed, ClockOptions options) {
  if (count < 1) throw ArgumentError("clock needs at least one edge");
  if (!(nominal_period > 0.0) || !(frame_period > 0.0)) throw ArgumentError("clock periods must be positive");
  if (!(rms_fraction >= 0.0) || !(rms_fraction < 0.5))
    throw ArgumentError("jitter rms fraction p must satisfy 0 <= p < 0.5");

  ClockRealization c;
  c.nominal_period = nominal_period;
  c.frame_period = frame_period;
  c.rms_fraction = rms_fraction;
  c.origin = options.origin;
  c.anchor_every = options.anchor_every;
  const double T = nominal_period;
  c.step_variance = T * T * T / frame_period * rms_fraction * rms_fraction;
  c.edges.resize(count);

  const double step_sigma = std::sqrt(c.step_variance);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double walk = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (options.anchor_every > 0 && k % options.anchor_every == 0) walk = 0.0;
    c.edges[k] = c.nominal(k) + walk;
    if (rms_fraction > 0.0) walk += step_sigma * gauss(rng);
  }
  for (std::size_t k = 1; k < count; ++k)
    if (!(c.edges[k] > c.edges[k - 1])) ++c.reorder_count;
  if (c.reorder_count > 0) std::sort(c.edges.begin(), c.edges.end());
  return c;
}

ClockRealization ideal_clock(std::size_t count, double nominal_period, double frame_period, double origin) {
  return realize_clock(count, nominal_period, frame_period, 0.0, 0, {origin, 0});
}

}  // namespace winsim
