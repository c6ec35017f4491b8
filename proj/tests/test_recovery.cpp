#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "winsim/errors.hpp"
#include "winsim/fiber_channel.hpp"
#include "winsim/multicoset_frontend.hpp"
#include "winsim/recovery.hpp"
#include "winsim/reference.hpp"

using namespace winsim;

namespace {

constexpr double kT = 100e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

SampleFrames frames_of(const Eigen::MatrixXd& y) {
  SampleFrames f;
  f.y = y;
  return f;
}

FiberParams fiber(double km) {
  FiberParams p;
  p.length_km = km;
  return p;
}

// Real part of the received Gaussian, normalized like the transmit pulse.
std::function<double(double)> dispersed_pulse(double km) {
  const double t0 = PulseShape::gaussian_width_from_fwhm(kT / 2);
  const double norm = PulseShape::gaussian(kT, t0).normalization();
  return [=](double t) { return norm * dispersed_gaussian(t0, fiber(km), t).real(); };
}

}  // namespace

TEST_CASE("recover_frames inverts T P exactly") {
  const auto bank = hadamard_bank(8, kT);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> lv(0, 3);
  Eigen::MatrixXd x(8, 50);
  for (int n = 0; n < 50; ++n)
    for (int l = 0; l < 8; ++l) x(l, n) = level_amplitude(lv(rng), 2);
  const auto r = recover_frames(frames_of(kT * bank.chips() * x), bank);
  REQUIRE(r.samples.size() == 400);
  CHECK(r.period == kT);
  for (int n = 0; n < 50; ++n)
    for (int l = 0; l < 8; ++l) CHECK(r.samples[static_cast<std::size_t>(n * 8 + l)] == doctest::Approx(x(l, n)).epsilon(1e-10));

  // y = first column of T P gives e1.
  const auto e = recover_frames(frames_of(kT * bank.chips().col(0)), bank);
  for (int l = 0; l < 8; ++l) CHECK(e.samples[static_cast<std::size_t>(l)] == doctest::Approx(l == 0 ? 1.0 : 0.0));
}

TEST_CASE("recovery error is (1/T) P^+ v") {
  const auto bank = hadamard_bank(8, kT);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(8, 3);
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(8, 3) * 1e-3 * kT;
  const auto r = recover_frames(frames_of(kT * bank.chips() * x + v), bank);
  const Eigen::MatrixXd expect = bank.chips().transpose() * v / (8.0 * kT);
  for (int n = 0; n < 3; ++n)
    for (int l = 0; l < 8; ++l)
      CHECK(r.samples[static_cast<std::size_t>(n * 8 + l)] - 1.0 == doctest::Approx(expect(l, n)).epsilon(1e-9));
}

TEST_CASE("recovered noise covariance is sigma^2 / (T^2 L) I") {
  const int L = 8;
  const int N = 100000;
  const auto bank = hadamard_bank(L, kT);
  const double sigma = 0.3 * kT;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, sigma);
  Eigen::MatrixXd v(L, N);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < L; ++m) v(m, n) = gauss(rng);
  const auto r = recover_frames(frames_of(v), bank);
  const Eigen::Map<const Eigen::MatrixXd> e(r.samples.data(), L, N);
  const Eigen::MatrixXd cov = e * e.transpose() / N;
  const double expect = sigma * sigma / (kT * kT * L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      if (i == j) CHECK(cov(i, j) == doctest::Approx(expect).epsilon(0.05));
      else CHECK(std::abs(cov(i, j)) < 0.05 * expect);
    }
}

TEST_CASE("non-square banks use least squares") {
  const auto h = hadamard_bank(8, kT).chips();
  Eigen::MatrixXd tall(10, 8);
  tall << h, h.topRows(2);
  const MixingBank bank(tall, kT);
  CHECK_FALSE(bank.is_hadamard());
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 6);
  const Eigen::MatrixXd y = kT * tall * x + 1e-3 * kT * Eigen::MatrixXd::Random(10, 6);
  const auto r = recover_frames(frames_of(y), bank);
  const Eigen::MatrixXd ref = reference::recover_least_squares(y, tall, kT);
  for (int n = 0; n < 6; ++n)
    for (int l = 0; l < 8; ++l) CHECK(r.samples[static_cast<std::size_t>(n * 8 + l)] == doctest::Approx(ref(l, n)).epsilon(1e-9));

  Eigen::MatrixXd dup = h;
  dup.row(7) = dup.row(6);
  CHECK_THROWS_AS(recover_frames(frames_of(Eigen::MatrixXd::Zero(8, 1)), MixingBank(dup, kT)), ConfigError);
  CHECK_THROWS_AS(recover_frames(frames_of(Eigen::MatrixXd::Zero(4, 1)), MixingBank(h.topRows(4), kT)), ConfigError);
}

TEST_CASE("scalar equalizers") {
  auto one = build_equalizer([](double t) { return t == 0.0 ? 1.0 : 0.0; }, 1, kT, kInf, 1.0);
  CHECK(one.taps.size() == 1);
  CHECK(one.taps(0) == doctest::Approx(1.0));
  auto two = build_equalizer([](double t) { return t == 0.0 ? 2.0 : 0.0; }, 1, kT, kInf, 1.0);
  CHECK(two.taps(0) == doctest::Approx(0.5));
  // scalar MMSE with noise: g / (g^2 + sigma_n^2)
  auto noisy = build_equalizer([](double) { return 2.0; }, 1, kT, 4.0, 1.0);
  CHECK(noisy.taps(0) == doctest::Approx(2.0 / (4.0 + 0.25)));
  CHECK_THROWS_AS(build_equalizer([](double) { return 1.0; }, 2, kT, 1.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(build_equalizer([](double) { return 1.0; }, 3, kT, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(build_equalizer([](double) { return 0.0; }, 3, kT, kInf, 1.0), NumericalError);
}

TEST_CASE("equalizer band structure") {
  const auto g = dispersed_pulse(140);
  const auto eq = build_equalizer(g, 3, kT, 100.0, 1.0);
  REQUIRE(eq.H.rows() == 3);
  REQUIRE(eq.H.cols() == 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) {
      if (j < i || j > i + 2) CHECK(eq.H(i, j) == 0.0);
      else CHECK(eq.H(i, j) == g((1 + i - j) * kT));
    }
  for (int i = 0; i < 3; ++i) CHECK(eq.h(i) == g((i - 1) * kT));
  CHECK(eq.noise_variance == doctest::Approx(0.01));
}

TEST_CASE("MMSE taps match an empirical regression") {
  const auto g = dispersed_pulse(140);
  const double snr = 3.0;
  const auto eq = build_equalizer(g, 3, kT, snr, 1.0);
  // Draw from the n0 = 3 model itself: x[m] = sum_{|d| <= 1} a[m-d] g(dT) + n[m],
  // then regress a[m] on [x[m-1], x[m], x[m+1]].
  const int n = 100000;
  const double taps[3] = {g(-kT), g(0.0), g(kT)};
  std::mt19937_64 rng(5);
  std::bernoulli_distribution bit(0.5);
  std::normal_distribution<double> noise(0.0, std::sqrt(1.0 / snr));
  std::vector<double> a(n + 2);
  for (double& v : a) v = bit(rng) ? 1.0 : -1.0;
  std::vector<double> x(n + 2, 0.0);
  for (int m = 1; m <= n; ++m) {
    double acc = noise(rng);
    for (int d = -1; d <= 1; ++d) acc += a[static_cast<std::size_t>(m - d)] * taps[d + 1];
    x[static_cast<std::size_t>(m)] = acc;
  }
  Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (int m = 2; m < n; ++m) {
    const Eigen::Vector3d z(x[static_cast<std::size_t>(m - 1)], x[static_cast<std::size_t>(m)], x[static_cast<std::size_t>(m + 1)]);
    R += z * z.transpose();
    p += z * a[static_cast<std::size_t>(m)];
  }
  const Eigen::Vector3d c = R.ldlt().solve(p);
  for (int i = 0; i < 3; ++i) CHECK(eq.taps(i) == doctest::Approx(c(i)).epsilon(0.02).scale(0.01));
}

TEST_CASE("MMSE taps are a local optimum of the model MSE") {
  const auto eq = build_equalizer(dispersed_pulse(140), 3, kT, 5.0, 1.0);
  const Eigen::MatrixXd R = eq.H * eq.H.transpose() + eq.noise_variance * Eigen::MatrixXd::Identity(3, 3);
  auto model_mse = [&](const Eigen::VectorXd& c) { return 1.0 - 2.0 * c.dot(eq.h) + c.dot(R * c); };
  const double best = model_mse(eq.taps);
  for (int i = 0; i < 3; ++i)
    for (double f : {0.99, 1.01}) {
      Eigen::VectorXd c = eq.taps;
      c(i) *= f;
      CHECK(model_mse(c) >= best);
    }
}

TEST_CASE("equalize_and_slice") {
  const auto s = generate_symbols(200, 2, kT, 3);
  RecoveredStream r{s.amplitudes(), kT};
  const auto eq = build_equalizer([](double t) { return t == 0.0 ? 1.0 : 0.0; }, 3, kT, kInf, 1.0);
  CHECK(equalize_and_slice(r, eq, 2).levels == s.levels);

  RecoveredStream tie{{0.0, 0.0, 0.0}, kT};
  CHECK(equalize_and_slice(tie, eq, 1).levels == std::vector<int>{0, 0, 0});
  RecoveredStream shortstream{{1.0}, kT};
  CHECK_THROWS_AS(equalize_and_slice(shortstream, eq, 1), ArgumentError);
}

TEST_CASE("4-PAM over dispersive fiber at high SNR is error free") {
  const double km = 40.0;
  const auto s = generate_symbols(10000, 2, kT, 21);
  const auto tx = PulseShape::gaussian(kT, PulseShape::gaussian_width_from_fwhm(kT / 2));
  auto rx = apply_channel(render_pam(s, tx, 32), fiber(km));
  rx.quadrature.clear();  // detect the in-phase component
  const auto cfg = MulticosetConfig::uniform(8, kT);
  const auto clock = ideal_clock(s.size() + 1, kT, cfg.frame_period());
  const auto stream = interleave(sample_multicoset(rx, cfg, clock, NoiseSpec{}, std::nullopt));
  const auto eq = build_equalizer(dispersed_pulse(km), 3, kT, 1e8, level_power(2), level_power(2));
  const auto hat = equalize_and_slice(RecoveredStream{stream, kT}, eq, 2);
  std::size_t errors = 0;
  for (std::size_t k = 0; k < s.size(); ++k) errors += hat.levels[k] != s.levels[k];
  CHECK(errors == 0);
}
