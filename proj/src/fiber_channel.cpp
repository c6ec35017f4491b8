#include "winsim/fiber_channel.hpp"

#include <cmath>
#include <numbers>

#include "detail/fft.hpp"
#include "winsim/errors.hpp"

namespace winsim {

void FiberParams::validate() const {
  if (!(length_km >= 0.0)) throw ArgumentError("fiber length must be >= 0");
  if (!(attenuation_db_per_km >= 0.0)) throw ArgumentError("fiber attenuation must be >= 0");
  if (!(wavelength_nm > 0.0)) throw ArgumentError("wavelength must be positive");
}

double FiberParams::beta2() const {
  const double lambda = wavelength_nm * 1e-9;           // m
  const double d = dispersion_ps_per_nm_km * 1e-6;      // s/m^2
  return 2.0 * std::numbers::pi * lambda * lambda * d / kSpeedOfLight * 1e3;  // s^2/km
}

double FiberParams::amplitude_factor() const {
  const double loss_db = attenuation_db_per_km * length_km;
  return attenuation_mode == AttenuationMode::Field ? std::pow(10.0, -loss_db / 20.0)
                                                    : std::pow(10.0, -loss_db / 10.0);
}

DenseWaveform apply_channel(const DenseWaveform& x, const FiberParams& params) {
  params.validate();
  if (x.size() < 2) throw ArgumentError("waveform needs at least two samples");
  const double T = x.symbol_period();
  const double a = params.quadratic_phase();
  const double shift = std::abs(params.length_km * params.beta1_s_per_km) / (2.0 * std::numbers::pi);
  // Group delay spread up to 4/T, where every modeled pulse has negligible energy.
  const double spread = std::abs(a) * 4.0 / (std::numbers::pi * T);
  const auto pad_symbols = static_cast<std::size_t>(std::ceil((8.0 * T + spread + shift) / T));
  const std::size_t pad = pad_symbols * static_cast<std::size_t>(x.osr);
  const std::size_t n = detail::fast_fft_size(x.size() + 2 * pad, static_cast<std::size_t>(x.osr));

  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < x.size(); ++i)
    buf[pad + i] = {x.samples[i], x.is_complex() ? x.quadrature[i] : 0.0};

  detail::fft_forward(buf);
  const double amp = params.amplitude_factor();
  const double lin = params.length_km * params.beta1_s_per_km;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = detail::bin_frequency(k, n, x.dt);
    const double phase = params.beta0 + lin * f + a * f * f;
    buf[k] *= amp * std::polar(1.0, phase);
  }
  detail::fft_inverse(buf);

  DenseWaveform out;
  out.osr = x.osr;
  out.dt = x.dt;
  out.t0 = x.t0 - static_cast<double>(pad) * x.dt;
  out.samples.resize(n);
  double re2 = 0.0, im2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = buf[i].real();
    re2 += buf[i].real() * buf[i].real();
    im2 += buf[i].imag() * buf[i].imag();
  }
  if (im2 > 1e-12 * re2) {
    out.quadrature.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.quadrature[i] = buf[i].imag();
  }
  return out;
}

std::complex<double> dispersed_gaussian(double width, const FiberParams& params, double t) {
  if (!(width > 0.0)) throw ArgumentError("Gaussian pulse width must be positive");
  params.validate();
  using namespace std::complex_literals;
  const double lambda = params.wavelength_nm * 1e-9;
  const double d = params.dispersion_ps_per_nm_km * 1e-6;
  const double length_m = params.length_km * 1e3;
  const std::complex<double> delta2 =
      width * width - 1i * (lambda * lambda / kSpeedOfLight) * d * length_m / (2.0 * std::numbers::pi);
  const std::complex<double> delta = std::sqrt(delta2);
  // exp(j L0 beta1 f) advances the waveform by L0 beta1 / (2 pi).
  const double ts = t + params.length_km * params.beta1_s_per_km / (2.0 * std::numbers::pi);
  return params.amplitude_factor() * std::polar(1.0, params.beta0) * (width / delta) *
         std::exp(-0.5 * ts * ts / delta2);
}

}  // namespace winsim
