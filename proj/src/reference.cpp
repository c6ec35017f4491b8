#include "winsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "winsim/errors.hpp"
#include "winsim/grid_integration.hpp"

namespace winsim::reference {

DenseWaveform render_amplitudes(std::span<const double> amplitudes, const PulseShape& shape, int osr) {
  if (osr < 2) throw ArgumentError("oversampling ratio must be >= 2");
  if (amplitudes.empty()) throw ArgumentError("need at least one symbol to render");
  const double T = shape.symbol_period();
  const long pad_left = std::max(0L, static_cast<long>(std::ceil(-shape.support_begin() / T - 1e-12)));
  const long pad_right = std::max(0L, static_cast<long>(std::ceil((shape.support_end() - T) / T - 1e-12)));
  const auto count = static_cast<long>(amplitudes.size());
  DenseWaveform w;
  w.osr = osr;
  w.dt = T / osr;
  w.t0 = -static_cast<double>(pad_left) * T;
  w.samples.assign(static_cast<std::size_t>((count + pad_left + pad_right) * osr), 0.0);
  // Each pulse is kept on the padded slots [-pad_left T, (1 + pad_right) T).
  const long dlo = -pad_left * osr;
  const long dhi = (1 + pad_right) * osr;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const long rel = static_cast<long>(i) - pad_left * osr;
    double acc = 0.0;
    for (long k = 0; k < count; ++k) {
      const long d = rel - k * osr;
      if (d < dlo || d >= dhi) continue;
      acc += amplitudes[static_cast<std::size_t>(k)] * shape.value((static_cast<double>(d) + 0.5) * w.dt);
    }
    w.samples[i] = acc;
  }
  return w;
}

SampleFrames sample_window(const DenseWaveform& x, const MixingBank& bank, const ClockRealization& clock,
                           const NoiseSpec& noise, const std::optional<QuantizerSpec>& quant) {
  noise.validate();
  const int L = bank.length();
  const int M = bank.channels();
  if (clock.size() < static_cast<std::size_t>(L) + 1 || (clock.size() - 1) % static_cast<std::size_t>(L) != 0)
    throw ArgumentError("clock must provide N*L + 1 edges for N whole frames");
  if (clock.edges.front() < x.t0 - 1e-9 * x.dt || clock.edges.back() > x.end_time() + 1e-9 * x.dt)
    throw ArgumentError("waveform too short: it must cover every clock edge of the requested frames");
  const std::size_t frames = (clock.size() - 1) / static_cast<std::size_t>(L);

  std::vector<double> z = x.samples;
  if (noise.n0 > 0.0) {
    std::vector<double> v(z.size());
    grid_noise(noise.seed, 0, std::sqrt(noise.n0 / x.dt), v);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += v[i];
  }
  const GridIntegrator integ(z, x.osr, std::lround(x.t0 / x.dt), x.t0, x.dt);

  SampleFrames out;
  out.frame_period = bank.frame_period();
  out.y = Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (int l = 0; l < L; ++l) {
      const std::size_t e = f * static_cast<std::size_t>(L) + static_cast<std::size_t>(l);
      const double chip = integ.integral(clock.edges[e], clock.edges[e + 1]);
      for (int m = 0; m < M; ++m) out.y(m, static_cast<Eigen::Index>(f)) += bank.chips()(m, l) * chip;
    }
    if (quant) {
      for (int m = 0; m < M; ++m) {
        double& v = out.y(m, static_cast<Eigen::Index>(f));
        if (is_overload(v, *quant)) ++out.overload_count;
        v = quantize(v, *quant);
      }
    }
  }
  return out;
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

Eigen::MatrixXd window_frames_analytic(std::span<const double> amplitudes, const PulseShape& shape,
                                       const MixingBank& bank, const ClockRealization& clock, int nodes,
                                       int pieces_per_symbol) {
  const int L = bank.length();
  const int M = bank.channels();
  const double T = shape.symbol_period();
  const std::size_t frames = (clock.size() - 1) / static_cast<std::size_t>(L);
  std::vector<double> gx;
  std::vector<double> gw;
  gauss_legendre(nodes, gx, gw);
  const double lo = shape.support_begin();
  const double hi = shape.support_end();
  const auto count = static_cast<long>(amplitudes.size());

  auto signal = [&](double t) {
    const long kmin = std::max(0L, static_cast<long>(std::floor((t - hi) / T)));
    const long kmax = std::min(count - 1, static_cast<long>(std::ceil((t - lo) / T)));
    double acc = 0.0;
    for (long k = kmin; k <= kmax; ++k) acc += amplitudes[static_cast<std::size_t>(k)] * shape.value(t - k * T);
    return acc;
  };
  auto integrate = [&](double a, double b) {
    // Split at symbol boundaries (kinks and jumps) and into equal pieces.
    double acc = 0.0;
    double s = a;
    while (s < b) {
      const double next_boundary = (std::floor(s / T + 1e-12) + 1.0) * T;
      const double e = std::min(b, next_boundary);
      const double h = (e - s) / pieces_per_symbol;
      for (int p = 0; p < pieces_per_symbol; ++p) {
        const double c = s + (p + 0.5) * h;
        for (int i = 0; i < nodes; ++i)
          acc += 0.5 * h * gw[static_cast<std::size_t>(i)] * signal(c + 0.5 * h * gx[static_cast<std::size_t>(i)]);
      }
      s = e;
    }
    return acc;
  };

  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(frames));
  for (std::size_t f = 0; f < frames; ++f)
    for (int l = 0; l < L; ++l) {
      const std::size_t e = f * static_cast<std::size_t>(L) + static_cast<std::size_t>(l);
      const double chip = integrate(clock.edges[e], clock.edges[e + 1]);
      for (int m = 0; m < M; ++m) y(m, static_cast<Eigen::Index>(f)) += bank.chips()(m, l) * chip;
    }
  return y;
}

Eigen::MatrixXd recover_least_squares(const Eigen::MatrixXd& y, const Eigen::MatrixXd& chips, double chip_period) {
  const Eigen::MatrixXd normal = chips.transpose() * chips;
  return normal.ldlt().solve(chips.transpose() * y) / chip_period;
}

}  // namespace winsim::reference
