#include "winsim/recovery.hpp"

#include <cmath>
#include <limits>

#include "winsim/errors.hpp"

namespace winsim {

RecoveredStream recover_frames(const SampleFrames& frames, const MixingBank& bank) {
  const int M = bank.channels();
  const int L = bank.length();
  const double T = bank.chip_period();
  if (frames.channels() != M) throw ArgumentError("frame channel count does not match the mixing bank");
  if (M < L) throw ConfigError("mixing bank has fewer channels than chips; P is not left-invertible");
  const int N = frames.frames();

  RecoveredStream out;
  out.period = T;
  out.samples.resize(static_cast<std::size_t>(N) * static_cast<std::size_t>(L));

  if (bank.is_hadamard()) {
    const Eigen::MatrixXd pt = bank.chips().transpose();
    const double scale = 1.0 / (T * L);
#pragma omp parallel for schedule(static)
    for (int n = 0; n < N; ++n) {
      Eigen::Map<Eigen::VectorXd> dst(out.samples.data() + static_cast<std::size_t>(n) * L, L);
      dst.noalias() = pt * frames.y.col(n);
      dst *= scale;
    }
    return out;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bank.chips());
  if (qr.rank() < L) throw ConfigError("mixing bank is rank deficient; P is not left-invertible");
  const Eigen::MatrixXd x = qr.solve(frames.y) / T;
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < L; ++l) out.samples[static_cast<std::size_t>(n) * L + l] = x(l, n);
  return out;
}

EqualizerModel build_equalizer(const std::function<double(double)>& pulse, int order, double symbol_period,
                               double snr, double signal_variance, double symbol_variance) {
  if (order < 1 || order % 2 == 0) throw ArgumentError("equalizer order n0 must be an odd positive integer");
  if (!(snr > 0.0)) throw ArgumentError("SNR must be positive");
  if (!(symbol_period > 0.0)) throw ArgumentError("symbol period must be positive");
  if (!(symbol_variance > 0.0) || !(signal_variance >= 0.0)) throw ArgumentError("variances must be positive");

  EqualizerModel eq;
  eq.order = order;
  eq.half_width = order / 2;
  eq.symbol_variance = symbol_variance;
  eq.noise_variance = std::isinf(snr) ? 0.0 : signal_variance / snr;
  const int k = eq.half_width;
  const int cols = 2 * order - 1;
  eq.H = Eigen::MatrixXd::Zero(order, cols);
  for (int i = 0; i < order; ++i)
    for (int j = i; j <= i + 2 * k; ++j) eq.H(i, j) = pulse((k + i - j) * symbol_period);
  eq.h.resize(order);
  for (int i = 0; i < order; ++i) eq.h(i) = pulse((i - k) * symbol_period);

  const Eigen::MatrixXd A =
      eq.H * eq.H.transpose() +
      (eq.noise_variance / symbol_variance) * Eigen::MatrixXd::Identity(order, order);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) throw NumericalError("equalizer system is singular (condition number > 1e12)");
  eq.taps = A.ldlt().solve(eq.h);
  return eq;
}

std::vector<double> equalize(std::span<const double> stream, const EqualizerModel& eq) {
  const auto n = static_cast<long>(stream.size());
  const int k = eq.half_width;
  std::vector<double> soft(stream.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < eq.order; ++j) {
      const long idx = i - k + j;
      if (idx >= 0 && idx < n) acc += eq.taps(j) * stream[static_cast<std::size_t>(idx)];
    }
    soft[static_cast<std::size_t>(i)] = acc;
  }
  return soft;
}

SymbolStream equalize_and_slice(const RecoveredStream& stream, const EqualizerModel& eq, int bits_per_symbol) {
  if (stream.samples.size() < static_cast<std::size_t>(eq.order)) throw ArgumentError("stream shorter than the equalizer");
  const auto soft = equalize(stream.samples, eq);
  SymbolStream out;
  out.bits_per_symbol = bits_per_symbol;
  out.symbol_period = stream.period;
  out.levels.resize(soft.size());
  for (std::size_t i = 0; i < soft.size(); ++i) out.levels[i] = nearest_level(soft[i], bits_per_symbol);
  return out;
}

}  // namespace winsim
