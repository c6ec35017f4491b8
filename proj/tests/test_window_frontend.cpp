#include <doctest.h>

#include <cmath>
#include <string>

#include "winsim/errors.hpp"
#include "winsim/reference.hpp"
#include "winsim/window_frontend.hpp"

using namespace winsim;

namespace {

constexpr double kT = 50e-12;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Nyquist-interval values x_l[n] laid out as an L x N matrix.
Eigen::MatrixXd nyquist_matrix(const SymbolStream& s, int L) {
  const int n = static_cast<int>(s.size()) / L;
  Eigen::MatrixXd x(L, n);
  for (int f = 0; f < n; ++f)
    for (int l = 0; l < L; ++l) x(l, f) = s.amplitude(static_cast<std::size_t>(f * L + l));
  return x;
}

}  // namespace

TEST_CASE("hadamard banks") {
  const auto b1 = hadamard_bank(1, kT);
  CHECK(b1.chips().rows() == 1);
  CHECK(b1.chips()(0, 0) == 1.0);

  const auto b2 = hadamard_bank(2, kT);
  Eigen::Matrix2d expect;
  expect << 1, 1, 1, -1;
  CHECK(b2.chips() == Eigen::MatrixXd(expect));

  for (int L : {4, 8, 12, 16, 20, 24, 32}) {
    const auto b = hadamard_bank(L, kT);
    CAPTURE(L);
    CHECK(b.is_hadamard());
    const Eigen::MatrixXd g = b.chips() * b.chips().transpose();
    CHECK(g == L * Eigen::MatrixXd::Identity(L, L));
    CHECK(b.frame_period() == doctest::Approx(L * kT));
  }
  // Sylvester orders are symmetric, so P^-1 = P / L.
  const auto b8 = hadamard_bank(8, kT);
  CHECK(b8.chips() == b8.chips().transpose());
}

TEST_CASE("unsupported Hadamard orders name the supported ones") {
  CHECK_FALSE(hadamard_order_supported(6));
  CHECK_FALSE(hadamard_order_supported(3));
  CHECK(hadamard_order_supported(12));
  try {
    hadamard_bank(6, kT);
    FAIL("expected an error");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1 2 4 8 12 16") != std::string::npos);
  }
  CHECK_THROWS_AS(MixingBank(Eigen::MatrixXd::Constant(2, 2, 0.5), kT), ArgumentError);
}

TEST_CASE("piecewise-constant input gives y = T P x exactly") {
  for (int L : {2, 8, 12}) {
    CAPTURE(L);
    const int frames = 20;
    const auto s = generate_symbols(static_cast<std::size_t>(L * frames), 2, kT, 31);
    const auto x = render_pam(s, PulseShape::rectangular(kT), 32);
    const auto bank = hadamard_bank(L, kT);
    const auto clock = ideal_clock(static_cast<std::size_t>(L * frames + 1), kT, bank.frame_period());
    const auto y = sample_window(x, bank, clock, NoiseSpec{}, std::nullopt);
    const Eigen::MatrixXd expect = kT * bank.chips() * nyquist_matrix(s, L);
    CHECK(max_abs(y.y - expect) <= 1e-10 * max_abs(expect));
  }
}

TEST_CASE("grid quadrature converges on smooth pulses") {
  const int L = 8;
  const int frames = 12;
  const auto g = PulseShape::gaussian(kT, PulseShape::gaussian_width_from_fwhm(kT / 2));
  const auto s = generate_symbols(L * frames, 2, kT, 5);
  const auto bank = hadamard_bank(L, kT);
  const auto clock = ideal_clock(L * frames + 1, kT, bank.frame_period());
  const auto coarse = sample_window(render_pam(s, g, 64), bank, clock, NoiseSpec{}, std::nullopt);
  const auto fine = sample_window(render_pam(s, g, 256), bank, clock, NoiseSpec{}, std::nullopt);
  const auto amps = s.amplitudes();
  const Eigen::MatrixXd exact = reference::window_frames_analytic(amps, g, bank, clock);
  const double scale = max_abs(exact);
  CHECK(max_abs(coarse.y - fine.y) <= 1e-5 * scale);
  CHECK(max_abs(fine.y - exact) <= 1e-7 * scale);
}

TEST_CASE("integrated white noise has variance n0 T_s") {
  // T_s = 3.2 ns with L = 8; the waveform grid is coarse to keep memory small.
  const int L = 8;
  const double T = 0.4e-9;
  const std::size_t frames = 100000;
  DenseWaveform zero;
  zero.osr = 4;
  zero.dt = T / 4;
  zero.samples.assign(frames * L * 4, 0.0);
  const auto bank = hadamard_bank(L, T);
  const auto clock = ideal_clock(frames * L + 1, T, bank.frame_period());
  const NoiseSpec noise{1e-12, 8};
  const auto y = sample_window(zero, bank, clock, noise, std::nullopt);
  for (int m = 0; m < L; ++m) {
    const double var = y.y.row(m).squaredNorm() / static_cast<double>(frames);
    CAPTURE(m);
    CHECK(var == doctest::Approx(3.2e-21).epsilon(0.03));
  }
}

TEST_CASE("parallel kernel matches the serial reference") {
  const int L = 8;
  const int frames = 40;
  const auto g = PulseShape::led(kT, kT / 5);
  const auto s = generate_symbols(L * frames, 1, kT, 9);
  const auto x = render_pam(s, g, 32);
  const auto bank = hadamard_bank(L, kT);
  const auto clock = realize_clock(L * frames + 1, kT, bank.frame_period(), 0.05, 4, {0.0, 8});
  const QuantizerSpec q{5, window_default_range(1, bank.frame_period()), Overload::Saturate};
  const NoiseSpec noise{1e-3 * kT, 6};
  const auto fast = sample_window(x, bank, clock, noise, q);
  const auto slow = reference::sample_window(x, bank, clock, noise, q);
  CHECK(max_abs(fast.y - slow.y) <= 1e-12 * max_abs(slow.y));
  CHECK(fast.overload_count == slow.overload_count);
}

TEST_CASE("effective mixing matrix") {
  const int L = 8;
  const auto bank = hadamard_bank(L, kT);
  auto clock = ideal_clock(2 * L + 1, kT, bank.frame_period());
  CHECK(effective_mixing_matrix(bank, clock, 0) == bank.chips());

  // Edge 3 late by T/4: chip 2 covers all of interval 2 and a quarter of 3.
  clock.edges[3] += 0.25 * kT;
  const Eigen::MatrixXd pe = effective_mixing_matrix(bank, clock, 0);
  const Eigen::MatrixXd& p = bank.chips();
  for (int m = 0; m < L; ++m) {
    CHECK(pe(m, 2) == doctest::Approx(p(m, 2)));
    CHECK(pe(m, 3) == doctest::Approx(0.25 * p(m, 2) + 0.75 * p(m, 3)));
    for (int k : {0, 1, 4, 5, 6, 7}) CHECK(pe(m, k) == p(m, k));
  }
  CHECK(effective_mixing_matrix(bank, clock, 1) == bank.chips());

  // With anchored frame edges every Nyquist interval stays fully covered by
  // chips, so the all-ones row keeps its sum L; sample_window follows P~ on
  // piecewise-constant inputs.
  const int frames = 30;
  const auto jittered = realize_clock(L * frames + 1, kT, bank.frame_period(), 0.2, 21, {0.0, 8});
  const auto s = generate_symbols(L * frames, 2, kT, 2);
  const auto y = sample_window(render_pam(s, PulseShape::rectangular(kT), 32), bank, jittered, NoiseSpec{},
                               std::nullopt);
  const Eigen::MatrixXd xs = nyquist_matrix(s, L);
  for (int f = 0; f < frames; ++f) {
    const Eigen::MatrixXd pf = effective_mixing_matrix(bank, jittered, static_cast<std::size_t>(f));
    CHECK(pf.row(0).sum() == doctest::Approx(L));
    const Eigen::VectorXd expect = kT * pf * xs.col(f);
    CHECK(max_abs(y.y.col(f) - expect) <= 1e-10 * max_abs(expect));
  }
}

TEST_CASE("jitter continuity") {
  const int L = 8;
  const int frames = 30;
  const auto g = PulseShape::gaussian(kT, PulseShape::gaussian_width_from_fwhm(kT / 2));
  const auto s = generate_symbols(L * frames, 1, kT, 13);
  const auto x = render_pam(s, g, 32);
  const auto bank = hadamard_bank(L, kT);
  const auto ideal = sample_window(x, bank, ideal_clock(L * frames + 1, kT, bank.frame_period()), NoiseSpec{},
                                   std::nullopt);
  auto deviation = [&](double p) {
    const auto c = realize_clock(L * frames + 1, kT, bank.frame_period(), p, 99, {0.0, 8});
    return max_abs(sample_window(x, bank, c, NoiseSpec{}, std::nullopt).y - ideal.y);
  };
  const double d3 = deviation(1e-3);
  const double d4 = deviation(1e-4);
  CHECK(d4 < d3);
  CHECK(d4 < 0.2 * d3);
  CHECK(d3 < 1e-2 * max_abs(ideal.y));
}

TEST_CASE("sample_window argument checks") {
  const auto bank = hadamard_bank(8, kT);
  const auto x = render_pam(generate_symbols(16, 1, kT, 1), PulseShape::rectangular(kT), 32);
  CHECK_THROWS_AS(sample_window(x, bank, ideal_clock(33, kT, bank.frame_period()), NoiseSpec{}, std::nullopt),
                  ArgumentError);
  CHECK_THROWS_AS(sample_window(x, bank, ideal_clock(12, kT, bank.frame_period()), NoiseSpec{}, std::nullopt),
                  ArgumentError);
  const auto clipped = sample_window(x, bank, ideal_clock(17, kT, bank.frame_period()), NoiseSpec{},
                                     QuantizerSpec{4, 0.5 * kT, Overload::Saturate});
  CHECK(clipped.overload_count > 0);
  CHECK(clipped.y.cwiseAbs().maxCoeff() < 0.25 * kT);
}
