#include "winsim/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "winsim/errors.hpp"
#include "winsim/rng.hpp"

namespace winsim {

namespace {

constexpr double kTailThreshold = 1e-9;

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_bits(int bits) {
  if (bits < 1 || bits > 16) throw ArgumentError("bits per symbol must be in [1, 16]");
}

}  // namespace

int level_count(int bits_per_symbol) {
  check_bits(bits_per_symbol);
  return 1 << bits_per_symbol;
}

double level_spacing(int bits_per_symbol) {
  const int n = level_count(bits_per_symbol);
  return static_cast<double>(n) / (n - 1);
}

double level_amplitude(int level, int bits_per_symbol) {
  const int n = level_count(bits_per_symbol);
  if (level < 0 || level >= n) throw ArgumentError("symbol level index out of range");
  return -0.5 * n + level * level_spacing(bits_per_symbol);
}

double level_power(int bits_per_symbol) {
  const int n = level_count(bits_per_symbol);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += std::pow(level_amplitude(j, bits_per_symbol), 2);
  return acc / n;
}

int nearest_level(double value, int bits_per_symbol) {
  const int n = level_count(bits_per_symbol);
  const double pos = (value + 0.5 * n) / level_spacing(bits_per_symbol);
  // ceil(pos - 1/2) rounds half down.
  const double j = std::ceil(pos - 0.5);
  if (!(j > 0.0)) return 0;
  if (j >= n - 1) return n - 1;
  return static_cast<int>(j);
}

double SymbolStream::amplitude(std::size_t k) const {
  return level_amplitude(levels.at(k), bits_per_symbol);
}

std::vector<double> SymbolStream::amplitudes() const {
  std::vector<double> out(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) out[k] = level_amplitude(levels[k], bits_per_symbol);
  return out;
}

SymbolStream generate_symbols(std::size_t count, int bits_per_symbol, double symbol_period,
                              std::uint64_t seed) {
  if (count < 1) throw ArgumentError("symbol count must be >= 1");
  if (bits_per_symbol < 1 || bits_per_symbol > 16) throw ArgumentError("bits per symbol must be in [1, 16]");
  if (!(symbol_period > 0.0)) throw ArgumentError("symbol period must be positive");
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, (1 << bits_per_symbol) - 1);
  SymbolStream s;
  s.bits_per_symbol = bits_per_symbol;
  s.symbol_period = symbol_period;
  s.levels.resize(count);
  for (auto& l : s.levels) l = pick(rng);
  return s;
}

// ---------------------------------------------------------------------------

PulseShape::PulseShape(PulseKind kind, double period, double param)
    : kind_(kind), period_(period), param_(param) {
  if (!(period > 0.0)) throw ArgumentError("symbol period must be positive");
}

PulseShape PulseShape::rectangular(double symbol_period) {
  PulseShape p(PulseKind::Rectangular, symbol_period, 0.0);
  p.finalize();
  return p;
}

PulseShape PulseShape::led(double symbol_period, double time_constant) {
  if (!(time_constant > 0.0)) throw ArgumentError("LED time constant must be positive");
  PulseShape p(PulseKind::Led, symbol_period, time_constant);
  p.finalize();
  return p;
}

PulseShape PulseShape::gaussian(double symbol_period, double width) {
  if (!(width > 0.0)) throw ArgumentError("Gaussian pulse width must be positive");
  PulseShape p(PulseKind::Gaussian, symbol_period, width);
  p.finalize();
  return p;
}

double PulseShape::gaussian_width_from_fwhm(double fwhm) {
  return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

PulseShape PulseShape::laser(double symbol_period, std::vector<double> table, double table_step) {
  if (table.size() < 2) throw ArgumentError("laser pulse table needs at least two samples");
  if (!(table_step > 0.0)) throw ArgumentError("laser pulse table step must be positive");
  PulseShape p(PulseKind::Laser, symbol_period, 0.0);
  p.table_ = std::move(table);
  p.table_step_ = table_step;
  p.finalize();
  return p;
}

double PulseShape::center_offset() const noexcept {
  return kind_ == PulseKind::Gaussian ? 0.5 * period_ : 0.0;
}

double PulseShape::raw(double t) const {
  const double T = period_;
  switch (kind_) {
    case PulseKind::Rectangular:
      return (t >= 0.0 && t < T) ? 1.0 : 0.0;
    case PulseKind::Led: {
      if (t < 0.0) return 0.0;
      if (t < T) return -std::expm1(-t / param_);
      return -std::expm1(-T / param_) * std::exp(-(t - T) / param_);
    }
    case PulseKind::Gaussian: {
      const double u = t / param_;
      return std::exp(-0.5 * u * u);
    }
    case PulseKind::Laser: {
      if (t < 0.0) return 0.0;
      const double pos = t / table_step_;
      const auto i = static_cast<std::size_t>(pos);
      if (i + 1 >= table_.size()) return (i + 1 == table_.size() && pos == static_cast<double>(i)) ? table_.back() : 0.0;
      const double f = pos - static_cast<double>(i);
      return table_[i] * (1.0 - f) + table_[i + 1] * f;
    }
  }
  return 0.0;
}

void PulseShape::finalize() {
  const double T = period_;
  double area = T;
  switch (kind_) {
    case PulseKind::Rectangular:
      area = T;
      break;
    case PulseKind::Led:
      area = T + param_ * std::expm1(-T / param_);
      break;
    case PulseKind::Gaussian:
      area = param_ * std::sqrt(2.0 * std::numbers::pi) * std::erf(T / (2.0 * std::numbers::sqrt2 * param_));
      break;
    case PulseKind::Laser: {
      // Exact integral of the piecewise-linear table over [0, T].
      area = 0.0;
      for (std::size_t i = 0; i + 1 < table_.size(); ++i) {
        const double a = static_cast<double>(i) * table_step_;
        if (a >= T) break;
        const double b = std::min(a + table_step_, T);
        area += 0.5 * (raw(a) + raw(b)) * (b - a);
      }
      break;
    }
  }
  if (!(std::abs(area) > 0.0)) throw ArgumentError("pulse has zero area over its symbol slot");
  norm_ = T / area;
}

double PulseShape::support_begin() const {
  if (kind_ == PulseKind::Gaussian) {
    return center_offset() - param_ * std::sqrt(-2.0 * std::log(kTailThreshold));
  }
  return 0.0;
}

double PulseShape::support_end() const {
  const double T = period_;
  switch (kind_) {
    case PulseKind::Rectangular:
      return T;
    case PulseKind::Led:
      return T - param_ * std::log(kTailThreshold);
    case PulseKind::Gaussian:
      return center_offset() + param_ * std::sqrt(-2.0 * std::log(kTailThreshold));
    case PulseKind::Laser:
      return static_cast<double>(table_.size() - 1) * table_step_;
  }
  return T;
}

double PulseShape::nyquist_isi() const {
  const double T = period_;
  const double c = 0.5 * T;
  const double main = std::abs(value(c));
  if (main == 0.0) return std::numeric_limits<double>::infinity();
  const long lo = static_cast<long>(std::floor((support_begin() - c) / T)) - 1;
  const long hi = static_cast<long>(std::ceil((support_end() - c) / T)) + 1;
  double worst = 0.0;
  for (long n = lo; n <= hi; ++n) {
    if (n == 0) continue;
    worst = std::max(worst, std::abs(value(c + static_cast<double>(n) * T)) / main);
  }
  return worst;
}

double eval_pulse(const PulseShape& shape, double t) { return shape.raw(t); }

// ---------------------------------------------------------------------------

double DenseWaveform::interpolate(double t) const {
  const auto n = static_cast<long>(samples.size());
  if (n == 0) return 0.0;
  const double s = (t - t0) / dt - 0.5;
  const long i = static_cast<long>(std::floor(s));
  const double u = s - static_cast<double>(i);
  auto at = [&](long j) { return samples[static_cast<std::size_t>(std::clamp(j, 0L, n - 1))]; };
  const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  return p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + u * (3.0 * (p1 - p2) + p3 - p0)));
}

double DenseWaveform::energy() const {
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  for (double v : quadrature) acc += v * v;
  return acc * dt;
}

DenseWaveform render_amplitudes(std::span<const double> amplitudes, const PulseShape& shape, int osr) {
  if (osr < 2) throw ArgumentError("oversampling ratio must be >= 2");
  if (amplitudes.empty()) throw ArgumentError("need at least one symbol to render");
  const double T = shape.symbol_period();
  const double dt = T / osr;
  const long pad_left = std::max(0L, static_cast<long>(std::ceil(-shape.support_begin() / T - 1e-12)));
  const long pad_right = std::max(0L, static_cast<long>(std::ceil((shape.support_end() - T) / T - 1e-12)));
  const long count = static_cast<long>(amplitudes.size());

  // Pulse samples on the cell grid for a symbol whose slot starts at cell 0.
  const long dlo = -pad_left * osr;
  const long dhi = (1 + pad_right) * osr;
  std::vector<double> pulse(static_cast<std::size_t>(dhi - dlo));
  for (long d = dlo; d < dhi; ++d) pulse[static_cast<std::size_t>(d - dlo)] = shape.value((static_cast<double>(d) + 0.5) * dt);

  DenseWaveform w;
  w.osr = osr;
  w.dt = dt;
  w.t0 = -static_cast<double>(pad_left) * T;
  const long cells = (count + pad_left + pad_right) * osr;
  w.samples.assign(static_cast<std::size_t>(cells), 0.0);
  const long origin = pad_left * osr;

#pragma omp parallel for schedule(static)
  for (long i = 0; i < cells; ++i) {
    // Symbol k contributes when dlo <= i - origin - k*osr < dhi.
    const long rel = i - origin;
    const long kmin = std::max(0L, floor_div(rel - dhi, osr) + 1);
    const long kmax = std::min(count - 1, floor_div(rel - dlo, osr));
    double acc = 0.0;
    for (long k = kmin; k <= kmax; ++k) acc += amplitudes[static_cast<std::size_t>(k)] * pulse[static_cast<std::size_t>(rel - k * osr - dlo)];
    w.samples[static_cast<std::size_t>(i)] = acc;
  }
  return w;
}

DenseWaveform render_pam(const SymbolStream& stream, const PulseShape& shape, int osr) {
  const auto amps = stream.amplitudes();
  return render_amplitudes(amps, shape, osr);
}

}  // namespace winsim
