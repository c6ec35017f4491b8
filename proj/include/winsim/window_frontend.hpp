#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "winsim/impairments.hpp"
#include "winsim/waveform.hpp"

namespace winsim {

/// M x L matrix of +-1 chips. Row m is the basic period of the mixing
/// function p_m(t) = sum_l P(m,l) u(t - lT); frame period T_s = L T.
class MixingBank {
public:
  /// Validates that every entry is +-1.
  MixingBank(Eigen::MatrixXd chips, double chip_period);

  const Eigen::MatrixXd& chips() const noexcept { return chips_; }
  int channels() const noexcept { return static_cast<int>(chips_.rows()); }
  int length() const noexcept { return static_cast<int>(chips_.cols()); }
  double chip_period() const noexcept { return chip_period_; }
  double frame_period() const noexcept { return chip_period_ * length(); }
  /// Square with P P^T = L I exactly.
  bool is_hadamard() const noexcept { return hadamard_; }

private:
  Eigen::MatrixXd chips_;
  double chip_period_;
  bool hadamard_;
};

/// Orders for which hadamard_bank has a construction: 1, 2, Sylvester powers
/// of two, Paley orders q + 1 (q prime, q = 3 mod 4) and their doublings.
bool hadamard_order_supported(int order);
std::vector<int> supported_hadamard_orders(int max_order);

MixingBank hadamard_bank(int order, double chip_period);

/// Low-rate samples: y(m, n) for channel m and frame n.
struct SampleFrames {
  Eigen::MatrixXd y;
  double frame_period = 0.0;
  /// Samples beyond the quantizer's nominal range (clipped when saturating).
  std::size_t overload_count = 0;

  int channels() const noexcept { return static_cast<int>(y.rows()); }
  int frames() const noexcept { return static_cast<int>(y.cols()); }
};

/// Integrate-and-dump WINDOW front-end. Frame n integrates between clock edges
/// nL and (n+1)L; chip l of the frame lies between edges nL+l and nL+l+1 and
/// is weighted by P(m, l). All channels share the clock. The clock must have
/// N L + 1 edges and the waveform must cover them. Thermal noise is realized
/// on the waveform grid (variance n0/dt) and integrated with the signal.
SampleFrames sample_window(const DenseWaveform& x, const MixingBank& bank, const ClockRealization& clock,
                           const NoiseSpec& noise, const std::optional<QuantizerSpec>& quant);

/// P~ such that jittered sampling of a signal constant on each Nyquist
/// interval of frame n gives y[n] = T P~ x[n]: entry (m, k) is
/// sum_l P(m,l) |chip_l intersect interval_k| / T. Equals P for an ideal clock.
Eigen::MatrixXd effective_mixing_matrix(const MixingBank& bank, const ClockRealization& clock,
                                        std::size_t frame_index);

/// Dynamic range 2^{B_in} T_s covering any integrated +-1-mixed PAM frame.
double window_default_range(int bits_per_symbol, double frame_period);

}  // namespace winsim
