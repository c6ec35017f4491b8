#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "winsim/impairments.hpp"
#include "winsim/waveform.hpp"
#include "winsim/window_frontend.hpp"

/// Serial, straightforward implementations kept as test oracles and as the
/// baseline for the benchmarks.
namespace winsim::reference {

/// Direct sum over all symbols for every cell (no precomputed pulse table).
DenseWaveform render_amplitudes(std::span<const double> amplitudes, const PulseShape& shape, int osr);

/// Serial sample_window: same quadrature and noise stream as the parallel kernel.
SampleFrames sample_window(const DenseWaveform& x, const MixingBank& bank, const ClockRealization& clock,
                           const NoiseSpec& noise, const std::optional<QuantizerSpec>& quant);

/// Noiseless WINDOW samples of the continuous PAM signal sum_k a_k g(t - kT)
/// (symbol k's slot starts at kT), integrated with `nodes`-point
/// Gauss-Legendre rules on every piece between clock edges and symbol
/// boundaries. Independent of the waveform grid.
Eigen::MatrixXd window_frames_analytic(std::span<const double> amplitudes, const PulseShape& shape,
                                       const MixingBank& bank, const ClockRealization& clock, int nodes = 16,
                                       int pieces_per_symbol = 16);

/// x^ = (1/T) P^+ y through an explicit least-squares solve, frame by frame.
Eigen::MatrixXd recover_least_squares(const Eigen::MatrixXd& y, const Eigen::MatrixXd& chips, double chip_period);

}  // namespace winsim::reference
