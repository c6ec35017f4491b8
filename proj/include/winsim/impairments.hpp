#pragma once

#include <cstdint>
#include <vector>

#include "winsim/waveform.hpp"

namespace winsim {

/// White thermal noise with two-sided spectral density n0 (V^2 s).
struct NoiseSpec {
  double n0 = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// What the quantizer does with inputs beyond +-range/2.
enum class Overload {
  Saturate,   // clip to the outermost level
  Unbounded,  // keep extending the uniform level grid
};

/// Uniform mid-rise quantizer with 2^bits levels over `range`; step range/2^bits.
struct QuantizerSpec {
  int bits = 8;
  double range = 1.0;
  Overload overload = Overload::Saturate;

  double step() const;
  void validate() const;
};

double quantize(double v, const QuantizerSpec& spec);
/// |v| beyond the nominal range (counted as a clip/overload event).
bool is_overload(double v, const QuantizerSpec& spec);

/// Adds i.i.d. N(0, n0/dt) to every in-phase grid sample, so that integrating
/// over a span of length D yields variance n0 D. Noise is drawn in fixed
/// chunks with per-chunk derived seeds, so the result does not depend on the
/// thread count.
DenseWaveform add_thermal_noise(const DenseWaveform& x, const NoiseSpec& spec);

/// Fills `out` with N(0, sigma^2) draws for absolute grid indices
/// [first, first + out.size()), using the same chunked seeding as
/// add_thermal_noise.
void grid_noise(std::uint64_t seed, std::size_t first, double sigma, std::span<double> out);

struct ClockOptions {
  double origin = 0.0;
  /// When > 0, the accumulated walk restarts at every edge index that is a
  /// multiple of this value (edges anchored to the frame clock).
  std::size_t anchor_every = 0;
};

/// Clock edges t_k = origin + k T + W_k, W_{k+1} = W_k + sqrt(C) w_k,
/// C = (T^3 / T_s) p^2, W_0 = 0.
struct ClockRealization {
  std::vector<double> edges;
  double nominal_period = 0.0;
  double frame_period = 0.0;
  double rms_fraction = 0.0;
  double step_variance = 0.0;
  double origin = 0.0;
  std::size_t anchor_every = 0;
  /// Adjacent-edge inversions that were repaired by re-sorting.
  std::size_t reorder_count = 0;

  std::size_t size() const noexcept { return edges.size(); }
  double nominal(std::size_t k) const noexcept { return origin + static_cast<double>(k) * nominal_period; }
  double offset(std::size_t k) const noexcept { return edges[k] - nominal(k); }
};

ClockRealization realize_clock(std::size_t count, double nominal_period, double frame_period,
                               double rms_fraction, std::uint64_t seed, ClockOptions options = {});

/// Jitter-free clock with `count` edges.
ClockRealization ideal_clock(std::size_t count, double nominal_period, double frame_period,
                             double origin = 0.0);

}  // namespace winsim
