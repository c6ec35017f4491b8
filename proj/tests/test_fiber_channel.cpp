#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "winsim/fiber_channel.hpp"
#include "winsim/waveform.hpp"

using namespace winsim;

namespace {

constexpr double kT = 100e-12;  // 10 GHz Nyquist rate

FiberParams link(double km) {
  FiberParams p;
  p.length_km = km;
  p.dispersion_ps_per_nm_km = 17.0;
  p.wavelength_nm = 1550.0;
  return p;
}

double peak(const DenseWaveform& w) {
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double q = w.is_complex() ? w.quadrature[i] : 0.0;
    m = std::max(m, std::hypot(w.samples[i], q));
  }
  return m;
}

// Largest deviation between the FFT route and the closed form for one
// transmitted Gaussian, relative to the peak of the closed form.
double closed_form_error(double km, int osr) {
  const double t0 = PulseShape::gaussian_width_from_fwhm(kT / 2);
  const auto g = PulseShape::gaussian(kT, t0);
  const double one[] = {1.0};
  const auto out = apply_channel(render_amplitudes(one, g, osr), link(km));
  double err = 0.0;
  double ref_peak = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::complex<double> ref = g.normalization() * dispersed_gaussian(t0, link(km), out.cell_center(i) - kT / 2);
    const std::complex<double> got(out.samples[i], out.is_complex() ? out.quadrature[i] : 0.0);
    err = std::max(err, std::abs(got - ref));
    ref_peak = std::max(ref_peak, std::abs(ref));
  }
  return err / ref_peak;
}

}  // namespace

TEST_CASE("beta2 from D and lambda") {
  // 2 pi lambda^2 D / c with D in s/m^2, lambda in m, converted to s^2/km.
  const double lambda = 1550e-9;
  const double d = 17e-6;
  const double expect = 2.0 * std::numbers::pi * lambda * lambda * d / kSpeedOfLight * 1e3;
  CHECK(link(1).beta2() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("zero length is the identity") {
  const auto g = PulseShape::led(kT, kT / 5);
  const auto s = generate_symbols(50, 1, kT, 3);
  const auto x = render_pam(s, g, 32);
  const auto y = apply_channel(x, link(0));
  CHECK_FALSE(y.is_complex());
  const long shift = std::lround((x.t0 - y.t0) / y.dt);
  REQUIRE(shift >= 0);
  const double scale = peak(x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const long j = static_cast<long>(i) - shift;
    const double ref = (j >= 0 && j < static_cast<long>(x.size())) ? x.samples[static_cast<std::size_t>(j)] : 0.0;
    CHECK(std::abs(y.samples[i] - ref) <= 1e-12 * scale);
  }
}

TEST_CASE("lossless fiber conserves energy") {
  const auto g = PulseShape::gaussian(kT, PulseShape::gaussian_width_from_fwhm(kT / 2));
  const auto x = render_pam(generate_symbols(64, 2, kT, 8), g, 32);
  for (double km : {10.0, 80.0, 140.0}) {
    const auto y = apply_channel(x, link(km));
    CHECK(y.energy() == doctest::Approx(x.energy()).epsilon(1e-9));
  }
}

TEST_CASE("attenuation scales field or intensity") {
  const auto x = render_pam(generate_symbols(16, 1, kT, 1), PulseShape::rectangular(kT), 16);
  auto p = link(20);
  p.attenuation_db_per_km = 0.2;
  const double e_field = apply_channel(x, p).energy();
  CHECK(e_field / x.energy() == doctest::Approx(std::pow(10.0, -0.4)).epsilon(1e-9));
  p.attenuation_mode = AttenuationMode::Intensity;
  CHECK(apply_channel(x, p).energy() / x.energy() == doctest::Approx(std::pow(10.0, -0.8)).epsilon(1e-9));
}

TEST_CASE("dispersed_gaussian closed form") {
  const double t0 = 20e-12;
  CHECK(std::abs(dispersed_gaussian(t0, link(0), 13e-12) - std::exp(-0.5 * 13.0 * 13.0 / 400.0)) < 1e-15);
  // t = 0 gives T0 / delta
  const auto p = link(140);
  const double lam = 1550e-9;
  const std::complex<double> delta2(t0 * t0, -(lam * lam / kSpeedOfLight) * 17e-6 * 140e3 / (2.0 * std::numbers::pi));
  CHECK(std::abs(dispersed_gaussian(t0, p, 0.0) - t0 / std::sqrt(delta2)) < 1e-12);
}

TEST_CASE("FFT dispersion matches the closed form") {
  CHECK(closed_form_error(140.0, 32) < 1e-6);
  CHECK(closed_form_error(40.0, 32) < 1e-6);
}

TEST_CASE("dispersion composes additively") {
  const auto g = PulseShape::gaussian(kT, PulseShape::gaussian_width_from_fwhm(kT / 2));
  const auto x = render_pam(generate_symbols(20, 1, kT, 4), g, 32);
  auto a = link(50);
  a.beta0 = 0.3;
  auto b = link(90);
  b.beta0 = -0.1;
  auto ab = link(140);
  ab.beta0 = 0.2;
  const auto two = apply_channel(apply_channel(x, a), b);
  const auto one = apply_channel(x, ab);
  // Compare on the common time span.
  const double scale = peak(one);
  int compared = 0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    const long j = std::lround((one.cell_center(i) - two.t0) / two.dt - 0.5);
    if (j < 0 || j >= static_cast<long>(two.size())) continue;
    const auto jj = static_cast<std::size_t>(j);
    const std::complex<double> u(one.samples[i], one.is_complex() ? one.quadrature[i] : 0.0);
    const std::complex<double> v(two.samples[jj], two.is_complex() ? two.quadrature[jj] : 0.0);
    CHECK(std::abs(u - v) <= 1e-8 * scale);
    ++compared;
  }
  CHECK(compared >= static_cast<int>(x.size()));
}
