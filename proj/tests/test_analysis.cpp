#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "winsim/analysis.hpp"
#include "winsim/errors.hpp"

using namespace winsim;

namespace {

double db(double r) { return 10.0 * std::log10(r); }

SnrModel model(System s) {
  SnrModel m;
  m.system = s;
  m.signal_variance = 1.0;
  m.n0 = 1e-11;
  m.nyquist_period = 50e-12;
  m.frame_length = 8;
  m.bits_in = 1;
  m.sampler_bits = 8;
  return m;
}

// Rectangular OOK at 20 GHz into an 8-channel, 2.5 GHz front-end, with the
// noise level given directly as n0.
ExperimentConfig small_experiment(double n0) {
  ExperimentConfig c;
  c.name = "unit";
  c.signal.pulse = PulseKind::Rectangular;
  c.signal.nyquist_rate = 20e9;
  c.signal.bits_per_symbol = 1;
  c.frontend.channels = 8;
  c.frontend.sampling_rate = 2.5e9;
  c.frontend.sampler_bits = {8};
  c.frontend.overload = Overload::Unbounded;
  c.impairments.axis = SnrAxis::N0;
  c.impairments.axis_values = {n0};
  c.sweep.frames_per_trial = 256;
  c.sweep.min_trials = 8;
  c.sweep.max_trials = 8;
  c.sweep.seed = 77;
  return c;
}

}  // namespace

TEST_CASE("WINDOW SNR formula") {
  auto m = model(System::Window);
  CHECK(snr_window(m) == doctest::Approx(1.0 / (0.2 + 8.0 * std::pow(2.0, -14) / 12.0)).epsilon(1e-12));
  m.sampler_bits.reset();
  CHECK(snr_window(m) == doctest::Approx(m.nyquist_period / m.n0).epsilon(1e-12));
  m.n0 = 0.0;
  m.sampler_bits = 1;
  m.frame_length = 12;
  CHECK(snr_window(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multicoset SNR formula") {
  auto m = model(System::Multicoset);
  m.sampler_bits.reset();
  CHECK(snr_multicoset(m) == doctest::Approx(1.0 / m.n0).epsilon(1e-12));
  m.sampler_noise_bandwidth = 2e9;
  CHECK(snr_multicoset(m) == doctest::Approx(1.0 / (m.n0 * 2e9)).epsilon(1e-12));
  m.n0 = 0.0;
  m.sampler_bits = 1;
  CHECK(snr_multicoset(m) == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(snr_theory(m) == snr_multicoset(m));
  m.n0 = 0.0;
  m.sampler_bits.reset();
  CHECK(std::isinf(snr_multicoset(m)));
}

TEST_CASE("mse") {
  const std::vector<double> a{1.0, -2.0, 0.5};
  CHECK(mse(a, a) == 0.0);
  const std::vector<double> b{1.25, -1.75, 0.75};
  CHECK(mse(a, b) == doctest::Approx(0.0625));
  const std::vector<double> c{0.0, 0.0, 3.0};
  // (1 + 4 + 6.25) / 3
  CHECK(mse(a, c) == doctest::Approx(11.25 / 3.0));
  CHECK_THROWS_AS(mse(a, std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("ber and bit mapping") {
  const auto tx = generate_symbols(100, 1, 1.0, 4);
  CHECK(ber(tx, tx) == 0.0);
  auto flipped = tx;
  for (int& v : flipped.levels) v = 1 - v;
  CHECK(ber(tx, flipped) == 1.0);

  // Gray labels of neighbouring 4-PAM levels differ in one bit.
  for (int j = 0; j < 3; ++j) CHECK(std::popcount(bit_label(j, 2) ^ bit_label(j + 1, 2)) == 1);
  const auto tx4 = generate_symbols(100, 2, 1.0, 5);
  auto rx4 = tx4;
  rx4.levels[17] = rx4.levels[17] == 0 ? 1 : rx4.levels[17] - 1;
  CHECK(ber(tx4, rx4) == doctest::Approx(1.0 / 200.0));
  CHECK(bit_errors(tx4, rx4) == 1);
  CHECK_THROWS_AS(ber(tx, tx4), ArgumentError);
}

TEST_CASE("config validation reports every problem") {
  auto c = small_experiment(1e-11);
  c.validate();
  CHECK(c.frame_length() == 8);
  c.frontend.sampling_rate = 3e9;
  c.sweep.min_trials = 0;
  const auto errs = c.validation_errors();
  CHECK(errs.size() >= 2);
  bool mentions_l = false;
  for (const auto& e : errs) mentions_l = mentions_l || e.find("6.67") != std::string::npos;
  CHECK(mentions_l);
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("Monte-Carlo pipeline reproduces the closed forms") {
  const auto cfg = small_experiment(1e-11);
  const auto r = run_sweep(cfg);
  REQUIRE(r.points.size() == 2);
  // Pilot estimate of the variance of rectangular OOK.
  CHECK(r.signal_variance == doctest::Approx(1.0).epsilon(2e-3));
  const SweepPoint* w = nullptr;
  const SweepPoint* mc = nullptr;
  for (const auto& p : r.points) (p.system == System::Window ? w : mc) = &p;
  REQUIRE(w);
  REQUIRE(mc);
  CHECK(w->mse_bound * r.signal_variance == doctest::Approx(0.2 + 8.0 * std::pow(2.0, -14) / 12.0).epsilon(1e-9));
  CHECK(std::abs(db(w->mse / w->mse_bound)) < 0.2);
  CHECK(std::abs(db(mc->mse / mc->mse_bound)) < 0.2);
  // Ratio of the two bounds against the ratio of the measured errors.
  CHECK(std::abs(db(mc->mse / w->mse) - db(mc->mse_bound / w->mse_bound)) < 1.0);
  CHECK(w->trials == 8);
  CHECK(w->samples == 8u * 256u * 8u);
}

TEST_CASE("sweep is reproducible and seed dependent") {
  auto cfg = small_experiment(1e-12);
  cfg.sweep.min_trials = cfg.sweep.max_trials = 4;
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].mse == b.points[i].mse);
  cfg.sweep.seed = 78;
  const auto c = run_sweep(cfg);
  CHECK(c.points[0].mse != a.points[0].mse);
}

TEST_CASE("BER sweep with equalizer over a dispersive link") {
  ExperimentConfig c;
  c.name = "ber";
  c.signal.pulse = PulseKind::Gaussian;
  c.signal.nyquist_rate = 10e9;
  c.signal.gaussian_fwhm = 50e-12;
  c.channel.enabled = true;
  c.channel.fiber.length_km = 40;
  c.frontend.channels = 8;
  c.frontend.sampling_rate = 1.25e9;
  c.frontend.sampler_bits = {std::nullopt};
  c.impairments.axis_values = {6.0, 12.0};
  c.sweep.measure_mse = false;
  c.sweep.measure_ber = true;
  c.sweep.frames_per_trial = 128;
  c.sweep.min_trials = 2;
  c.sweep.max_trials = 40;
  c.sweep.target_errors = 50;
  c.sweep.seed = 3;
  const auto r = run_sweep(c);
  CHECK(r.has_ber);
  CHECK_FALSE(r.has_mse);
  for (const auto& p : r.points) {
    CHECK(p.ber >= 0.0);
    CHECK(p.ber <= 1.0);
    CHECK(p.bits > 0);
    if (p.trials < c.sweep.max_trials) CHECK(p.bit_errors >= 50);
  }
  // Higher SNR, fewer errors, for each system.
  for (std::size_t i = 0; i + 1 < r.points.size(); i += 2)
    if (r.points[i].system == r.points[i + 1].system) CHECK(r.points[i + 1].ber <= r.points[i].ber);
}
