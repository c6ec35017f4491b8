#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "winsim/waveform.hpp"
#include "winsim/window_frontend.hpp"

namespace winsim {

/// Nyquist-rate estimates, frames concatenated in time order.
struct RecoveredStream {
  std::vector<double> samples;
  double period = 0.0;
};

/// x^[n] = (1/T) P^+ y[n]. Square Hadamard banks use P^+ = P^T / L; other
/// banks go through a column-pivoted QR least-squares solve.
RecoveredStream recover_frames(const SampleFrames& frames, const MixingBank& bank);

/// Linear MMSE equalizer over n0 Nyquist samples centred on the symbol.
///
/// z^[n] = [x^[n-k] ... x^[n+k]]^T = H a[n] + noise with k = floor(n0/2) and
/// a[n] = [a[n-n0+1] ... a[n+n0-1]]^T. With the sampled pulse g,
/// H(i, j) = g((k + i - j) T) for 0 <= j - i <= 2k and h = [g(-kT) ... g(kT)]^T,
/// the column of H that multiplies a[n]. For even pulses this is the usual
/// banded form H(i, j) = g((j - i - k) T).
struct EqualizerModel {
  int order = 1;
  int half_width = 0;
  Eigen::MatrixXd H;
  Eigen::VectorXd h;
  Eigen::VectorXd taps;
  double noise_variance = 0.0;
  double symbol_variance = 1.0;
};

/// Taps c = (H H^T + (sigma_n^2 / sigma_a^2) I)^{-1} h with sigma_n^2 = signal_variance / snr,
/// solved without forming an inverse. sigma_a^2 is the symbol variance (1 for
/// OOK). snr may be +inf (no noise). Throws NumericalError when the system's
/// condition number exceeds 1e12.
EqualizerModel build_equalizer(const std::function<double(double)>& pulse, int order, double symbol_period,
                               double snr, double signal_variance, double symbol_variance = 1.0);

/// Soft estimates c^T z^[n] for every sample, zero-padded at the edges.
std::vector<double> equalize(std::span<const double> stream, const EqualizerModel& eq);

/// Equalizes and slices to the nearest PAM level (ties to the lower level).
SymbolStream equalize_and_slice(const RecoveredStream& stream, const EqualizerModel& eq, int bits_per_symbol);

}  // namespace winsim
