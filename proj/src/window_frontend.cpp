#include "winsim/window_frontend.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "winsim/errors.hpp"
#include "winsim/grid_integration.hpp"

namespace winsim {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool is_paley_order(int n) {
  const int q = n - 1;
  return q >= 3 && q % 4 == 3 && is_prime(q);
}

Eigen::MatrixXd sylvester_double(const Eigen::MatrixXd& h) {
  const auto n = h.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out << h, h, h, -h;
  return out;
}

// Paley construction I: H = [[1, 1^T], [-1, Q + I]] with Q the Jacobsthal
// matrix of GF(q), q prime.
Eigen::MatrixXd paley(int q) {
  std::vector<int> chi(static_cast<std::size_t>(q), -1);
  chi[0] = 0;
  for (int x = 1; x < q; ++x) chi[static_cast<std::size_t>((x * x) % q)] = 1;
  Eigen::MatrixXd h(q + 1, q + 1);
  h(0, 0) = 1.0;
  for (int i = 1; i <= q; ++i) {
    h(0, i) = 1.0;
    h(i, 0) = -1.0;
    for (int j = 1; j <= q; ++j) {
      const int diff = ((j - i) % q + q) % q;
      h(i, j) = static_cast<double>(chi[static_cast<std::size_t>(diff)]) + (i == j ? 1.0 : 0.0);
    }
  }
  return h;
}

bool exactly_orthogonal(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols()) return false;
  const Eigen::MatrixXd g = p * p.transpose();
  const double l = static_cast<double>(p.cols());
  return (g - l * Eigen::MatrixXd::Identity(p.rows(), p.rows())).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

MixingBank::MixingBank(Eigen::MatrixXd chips, double chip_period)
    : chips_(std::move(chips)), chip_period_(chip_period) {
  if (chips_.size() == 0) throw ArgumentError("mixing bank must be non-empty");
  if (!(chip_period > 0.0)) throw ArgumentError("chip period must be positive");
  if (!chips_.unaryExpr([](double v) { return v == 1.0 || v == -1.0 ? 0.0 : 1.0; }).isZero())
    throw ArgumentError("mixing bank entries must be +1 or -1");
  hadamard_ = exactly_orthogonal(chips_);
}

bool hadamard_order_supported(int order) {
  if (order < 1) return false;
  int base = order;
  while (true) {
    if (base == 1 || is_paley_order(base)) return true;
    if (base % 2 != 0) return false;
    base /= 2;
  }
}

std::vector<int> supported_hadamard_orders(int max_order) {
  std::vector<int> out;
  for (int n = 1; n <= max_order; ++n)
    if (hadamard_order_supported(n)) out.push_back(n);
  return out;
}

MixingBank hadamard_bank(int order, double chip_period) {
  if (!hadamard_order_supported(order)) {
    std::ostringstream msg;
    msg << "unsupported Hadamard order " << order << "; supported orders up to 64 are:";
    for (int n : supported_hadamard_orders(64)) msg << ' ' << n;
    msg << " (powers of two, q+1 for prime q = 3 mod 4, and their doublings)";
    throw ArgumentError(msg.str());
  }
  // Powers of two use the Sylvester construction; Paley only where needed.
  const bool power_of_two = (order & (order - 1)) == 0;
  int base = order;
  int doublings = 0;
  while (base != 1 && (power_of_two || !is_paley_order(base))) {
    base /= 2;
    ++doublings;
  }
  Eigen::MatrixXd h = base == 1 ? Eigen::MatrixXd::Ones(1, 1) : paley(base - 1);
  for (int i = 0; i < doublings; ++i) h = sylvester_double(h);
  MixingBank bank(std::move(h), chip_period);
  if (!bank.is_hadamard()) throw NumericalError("Hadamard construction failed orthogonality check");
  return bank;
}

double window_default_range(int bits_per_symbol, double frame_period) {
  return std::ldexp(1.0, bits_per_symbol) * frame_period;
}

SampleFrames sample_window(const DenseWaveform& x, const MixingBank& bank, const ClockRealization& clock,
                           const NoiseSpec& noise, const std::optional<QuantizerSpec>& quant) {
  noise.validate();
  if (quant) quant->validate();
  const int L = bank.length();
  const int M = bank.channels();
  const double T = bank.chip_period();
  if (clock.size() < static_cast<std::size_t>(L) + 1 || (clock.size() - 1) % static_cast<std::size_t>(L) != 0)
    throw ArgumentError("clock must provide N*L + 1 edges for N whole frames");
  if (std::abs(clock.nominal_period - T) > 1e-9 * T) throw ArgumentError("clock period differs from chip period");
  if (std::abs(x.symbol_period() - T) > 1e-9 * T) throw ArgumentError("waveform symbol period differs from chip period");
  const double tol = 1e-9 * x.dt;
  if (x.size() == 0 || clock.edges.front() < x.t0 - tol || clock.edges.back() > x.end_time() + tol)
    throw ArgumentError("waveform too short: it must cover every clock edge of the requested frames");
  const auto frames = static_cast<long>((clock.size() - 1) / static_cast<std::size_t>(L));

  const auto n = static_cast<long>(x.size());
  const long c_lo = std::max(0L, static_cast<long>(std::floor((clock.edges.front() - x.t0) / x.dt)) - 2);
  const long c_hi = std::min(n, static_cast<long>(std::ceil((clock.edges.back() - x.t0) / x.dt)) + 2);
  std::vector<double> z(x.samples.begin() + c_lo, x.samples.begin() + c_hi);
  if (noise.n0 > 0.0) {
    std::vector<double> v(z.size());
    grid_noise(noise.seed, static_cast<std::size_t>(c_lo), std::sqrt(noise.n0 / x.dt), v);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += v[i];
  }
  const long grid_origin = std::lround(x.t0 / x.dt);
  const GridIntegrator integ(z, x.osr, grid_origin + c_lo, x.t0 + static_cast<double>(c_lo) * x.dt, x.dt);

  SampleFrames out;
  out.frame_period = bank.frame_period();
  out.y.resize(M, frames);
  const Eigen::MatrixXd& P = bank.chips();
  std::size_t overloads = 0;

#pragma omp parallel for schedule(static) reduction(+ : overloads)
  for (long f = 0; f < frames; ++f) {
    Eigen::VectorXd chip(L);
    const std::size_t e0 = static_cast<std::size_t>(f) * static_cast<std::size_t>(L);
    for (int l = 0; l < L; ++l) chip(l) = integ.integral(clock.edges[e0 + l], clock.edges[e0 + l + 1]);
    Eigen::VectorXd col = P * chip;
    if (quant) {
      for (int m = 0; m < M; ++m) {
        if (is_overload(col(m), *quant)) ++overloads;
        col(m) = quantize(col(m), *quant);
      }
    }
    out.y.col(f) = col;
  }
  out.overload_count = overloads;
  return out;
}

Eigen::MatrixXd effective_mixing_matrix(const MixingBank& bank, const ClockRealization& clock,
                                        std::size_t frame_index) {
  const int L = bank.length();
  const double T = bank.chip_period();
  const std::size_t e0 = frame_index * static_cast<std::size_t>(L);
  if (e0 + static_cast<std::size_t>(L) >= clock.size()) throw ArgumentError("clock does not cover the requested frame");
  // Work in units of T relative to the frame start, using the clock offsets,
  // so an ideal clock gives integer overlaps and P~ = P exactly.
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(L, L);  // (chip l, interval k)
  for (int l = 0; l < L; ++l) {
    const double a = l + clock.offset(e0 + l) / T;
    const double b = l + 1 + clock.offset(e0 + l + 1) / T;
    for (int k = 0; k < L; ++k) {
      const double lo = std::max(a, static_cast<double>(k));
      const double hi = std::min(b, static_cast<double>(k + 1));
      if (hi > lo) overlap(l, k) = hi - lo;
    }
  }
  return bank.chips() * overlap;
}

}  // namespace winsim
