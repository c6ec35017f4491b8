#include "winsim/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <exception>
#include <limits>
#include <sstream>

#include "winsim/errors.hpp"
#include "winsim/grid_integration.hpp"
#include "winsim/multicoset_frontend.hpp"
#include "winsim/recovery.hpp"
#include "winsim/rng.hpp"
#include "winsim/window_frontend.hpp"

namespace winsim {

const char* to_string(System s) { return s == System::Window ? "window" : "multicoset"; }

void SnrModel::validate() const {
  if (!(signal_variance > 0.0)) throw ArgumentError("signal variance must be positive");
  if (!(n0 >= 0.0)) throw ArgumentError("n0 must be non-negative");
  if (!(nyquist_period > 0.0)) throw ArgumentError("Nyquist period must be positive");
  if (frame_length < 1) throw ArgumentError("frame length L must be >= 1");
  if (bits_in < 1) throw ArgumentError("B_in must be >= 1");
  if (sampler_bits && *sampler_bits < 1) throw ArgumentError("B_s must be >= 1");
  if (quantizer_range && !(*quantizer_range > 0.0)) throw ArgumentError("quantizer range must be positive");
  if (!(sampler_noise_bandwidth > 0.0)) throw ArgumentError("sampler noise bandwidth must be positive");
}

namespace {

double quantization_term(const SnrModel& m, bool window) {
  if (!m.sampler_bits) return 0.0;
  const int L = m.frame_length;
  const double T = m.nyquist_period;
  if (m.quantizer_range) {
    const double q = *m.quantizer_range / std::ldexp(1.0, *m.sampler_bits);
    return window ? q * q / (12.0 * T * T * L) : q * q / 12.0;
  }
  const double base = std::ldexp(1.0, 2 * (m.bits_in - *m.sampler_bits)) / 12.0;
  return window ? base * L : base;
}

double ratio(double signal, double noise) {
  return noise > 0.0 ? signal / noise : std::numeric_limits<double>::infinity();
}

}  // namespace

double snr_window(const SnrModel& m) {
  m.validate();
  return ratio(m.signal_variance, m.n0 / m.nyquist_period + quantization_term(m, true));
}

double snr_multicoset(const SnrModel& m) {
  m.validate();
  return ratio(m.signal_variance, m.n0 * m.sampler_noise_bandwidth + quantization_term(m, false));
}

double snr_theory(const SnrModel& m) {
  return m.system == System::Window ? snr_window(m) : snr_multicoset(m);
}

double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("mse: streams differ in length");
  if (a.empty()) throw ArgumentError("mse: empty streams");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

unsigned bit_label(int level, int bits_per_symbol) {
  const auto u = static_cast<unsigned>(level);
  return bits_per_symbol == 1 ? u : u ^ (u >> 1);
}

std::size_t bit_errors(const SymbolStream& tx, const SymbolStream& rx) {
  if (tx.size() != rx.size()) throw ArgumentError("ber: streams differ in length");
  if (tx.bits_per_symbol != rx.bits_per_symbol) throw ArgumentError("ber: streams differ in B_in");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < tx.size(); ++i)
    errors += static_cast<std::size_t>(std::popcount(bit_label(tx.levels[i], tx.bits_per_symbol) ^
                                                     bit_label(rx.levels[i], rx.bits_per_symbol)));
  return errors;
}

double ber(const SymbolStream& tx, const SymbolStream& rx) {
  if (tx.size() == 0) throw ArgumentError("ber: empty streams");
  const std::size_t errors = bit_errors(tx, rx);
  return static_cast<double>(errors) / (static_cast<double>(tx.size()) * tx.bits_per_symbol);
}

PulseShape SignalConfig::pulse_shape() const {
  const double T = symbol_period();
  switch (pulse) {
    case PulseKind::Rectangular:
      return PulseShape::rectangular(T);
    case PulseKind::Led:
      return PulseShape::led(T, led_time_constant);
    case PulseKind::Gaussian:
      return PulseShape::gaussian(T, PulseShape::gaussian_width_from_fwhm(gaussian_fwhm));
    case PulseKind::Laser:
      return PulseShape::laser(T, laser_table, laser_step);
  }
  throw ArgumentError("unknown pulse kind");
}

int ExperimentConfig::frame_length() const {
  if (!(signal.nyquist_rate > 0.0) || !(frontend.sampling_rate > 0.0)) return 0;
  return static_cast<int>(std::lround(signal.nyquist_rate / frontend.sampling_rate));
}

std::vector<std::string> ExperimentConfig::validation_errors() const {
  std::vector<std::string> err;
  auto add = [&](const std::string& s) { err.push_back(s); };
  if (systems.empty()) add("systems: at least one of window, multicoset is required");
  if (!(signal.nyquist_rate > 0.0)) add("signal.f_nyq: must be a positive frequency");
  if (signal.bits_per_symbol < 1 || signal.bits_per_symbol > 8) add("signal.bits_per_symbol: must be in 1..8");
  if (signal.oversampling < 8) add("signal.oversampling: must be >= 8");
  if (signal.pulse == PulseKind::Led && !(signal.led_time_constant > 0.0))
    add("signal.led_time_constant: must be a positive time for the LED pulse");
  if (signal.pulse == PulseKind::Gaussian && !(signal.gaussian_fwhm > 0.0))
    add("signal.gaussian_fwhm: must be a positive time for the Gaussian pulse");
  if (signal.pulse == PulseKind::Laser && (signal.laser_table.empty() || !(signal.laser_step > 0.0)))
    add("signal.laser: needs a non-empty table and a positive step");
  if (!(frontend.sampling_rate > 0.0)) add("frontend.f_s: must be a positive frequency");
  if (signal.nyquist_rate > 0.0 && frontend.sampling_rate > 0.0) {
    const double l = signal.nyquist_rate / frontend.sampling_rate;
    const long li = std::lround(l);
    if (li < 1 || std::abs(l - static_cast<double>(li)) > 1e-9 * l) {
      std::ostringstream s;
      s << "frontend: L = f_nyq / f_s = " << std::setprecision(3) << l << " is not an integer";
      add(s.str());
    } else {
      if (std::find(systems.begin(), systems.end(), System::Window) != systems.end() &&
          !hadamard_order_supported(static_cast<int>(li))) {
        std::ostringstream s;
        s << "frontend: L = " << li << " is not a supported Hadamard order; valid orders up to 64:";
        for (int n : supported_hadamard_orders(64)) s << ' ' << n;
        add(s.str());
      }
      if (frontend.channels != li)
        add("frontend.channels: must equal L = f_nyq / f_s (" + std::to_string(li) + ")");
    }
  }
  if (frontend.sampler_bits.empty()) add("frontend.sampler_bits: at least one value is required");
  for (const auto& b : frontend.sampler_bits)
    if (b && (*b < 1 || *b > 30)) add("frontend.sampler_bits: values must be in 1..30 or 'inf'");
  if (frontend.window_range && !(*frontend.window_range > 0.0)) add("frontend.window_range: must be positive");
  if (frontend.multicoset_range && !(*frontend.multicoset_range > 0.0))
    add("frontend.multicoset_range: must be positive");
  if (frontend.lpf_bandwidth && !(*frontend.lpf_bandwidth > 0.0)) add("frontend.lpf_bandwidth: must be positive");
  if (frontend.noise_bandwidth && !(*frontend.noise_bandwidth > 0.0))
    add("frontend.noise_bandwidth: must be positive");
  if (!(frontend.sampling_phase >= 0.0 && frontend.sampling_phase < 1.0))
    add("frontend.sampling_phase: must be in [0, 1)");
  if (channel.enabled) {
    try {
      channel.fiber.validate();
    } catch (const std::exception& e) {
      add(std::string("channel: ") + e.what());
    }
  }
  if (impairments.axis_values.empty()) add("impairments: snr_db or n0 needs at least one value");
  for (double v : impairments.axis_values) {
    if (!std::isfinite(v) || (impairments.axis == SnrAxis::N0 && v < 0.0)) {
      add("impairments: axis values must be finite (and n0 >= 0)");
      break;
    }
  }
  if (impairments.jitter.empty()) add("impairments.jitter: at least one value is required (use [0])");
  for (double p : impairments.jitter)
    if (!(p >= 0.0 && p < 0.5)) add("impairments.jitter: values must be in [0, 0.5)");
  if (!sweep.measure_mse && !sweep.measure_ber) add("sweep.metrics: choose mse, ber or both");
  if (sweep.frames_per_trial < 1) add("sweep.frames_per_trial: must be >= 1");
  if (sweep.min_trials < 2) add("sweep.min_trials: must be >= 2");
  if (sweep.max_trials < sweep.min_trials) add("sweep.max_trials: must be >= min_trials");
  if (sweep.batch_trials < 1) add("sweep.batch_trials: must be >= 1");
  if (!(sweep.target_rel_stderr > 0.0)) add("sweep.target_rel_stderr: must be positive");
  if (sweep.target_errors < 0) add("sweep.target_errors: must be >= 0");
  if (sweep.equalizer_order < 1 || sweep.equalizer_order % 2 == 0)
    add("sweep.equalizer_order: must be an odd positive integer");
  if (sweep.measure_ber && sweep.frames_per_trial * std::max(frame_length(), 1) <= sweep.equalizer_order)
    add("sweep.frames_per_trial: too few symbols for the equalizer");
  return err;
}

void ExperimentConfig::validate() const {
  const auto err = validation_errors();
  if (err.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : err) msg += "\n  - " + e;
  throw ConfigError(msg);
}

namespace {

struct Combo {
  int system = 0;
  int bits = 0;
  int jitter = 0;
  int axis = 0;
};

struct TrialStats {
  double sum_sq = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t overloads = 0;
  std::uint64_t reorders = 0;
};

struct Accumulator {
  double sum_sq = 0.0;
  double trial_sum = 0.0;
  double trial_sq = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t overloads = 0;
  std::uint64_t reorders = 0;
  int trials = 0;
  bool active = true;

  void add(const TrialStats& s) {
    const double m = s.samples ? s.sum_sq / static_cast<double>(s.samples) : 0.0;
    sum_sq += s.sum_sq;
    trial_sum += m;
    trial_sq += m * m;
    samples += s.samples;
    errors += s.errors;
    bits += s.bits;
    overloads += s.overloads;
    reorders += s.reorders;
    ++trials;
  }
  double mean() const { return samples ? sum_sq / static_cast<double>(samples) : 0.0; }
  double stderr_of_mean() const {
    if (trials < 2) return std::numeric_limits<double>::infinity();
    const double n = trials;
    const double var = std::max(0.0, (trial_sq - trial_sum * trial_sum / n) / (n - 1.0));
    return std::sqrt(var / n);
  }
};

// Everything that is fixed for the whole sweep.
struct Context {
  const ExperimentConfig* cfg = nullptr;
  PulseShape pulse = PulseShape::rectangular(1.0);
  double T = 0.0;
  int L = 0;
  int N = 0;
  int B_in = 1;
  int guard_left = 2;
  int guard_right = 2;
  double sigma_x2 = 1.0;
  double mc_noise_bandwidth = 1.0;
  std::optional<MixingBank> bank;
  MulticosetConfig mc;
  std::vector<double> n0;      // per axis point
  std::vector<double> snr_db;  // per axis point
  std::vector<Combo> combos;
  // Equalizer per (system, bits, axis), when measuring BER.
  std::vector<EqualizerModel> equalizers;
  std::size_t eq_index(int s, int b, int a) const {
    const std::size_t nb = cfg->frontend.sampler_bits.size();
    const std::size_t na = n0.size();
    return (static_cast<std::size_t>(s) * nb + static_cast<std::size_t>(b)) * na + static_cast<std::size_t>(a);
  }
};

DenseWaveform received(const ExperimentConfig& cfg, const DenseWaveform& tx) {
  return cfg.channel.enabled ? apply_channel(tx, cfg.channel.fiber) : tx;
}

std::optional<QuantizerSpec> quantizer_for(const Context& ctx, System s, int bits_index) {
  const auto& fe = ctx.cfg->frontend;
  const auto& b = fe.sampler_bits[static_cast<std::size_t>(bits_index)];
  if (!b) return std::nullopt;
  QuantizerSpec q;
  q.bits = *b;
  q.overload = fe.overload;
  if (s == System::Window)
    q.range = fe.window_range.value_or(window_default_range(ctx.B_in, ctx.T * ctx.L));
  else
    q.range = fe.multicoset_range.value_or(multicoset_default_range(ctx.B_in));
  return q;
}

SnrModel model_for(const Context& ctx, System s, int bits_index, int axis_index) {
  const auto& fe = ctx.cfg->frontend;
  SnrModel m;
  m.system = s;
  m.signal_variance = ctx.sigma_x2;
  m.n0 = ctx.n0[static_cast<std::size_t>(axis_index)];
  m.nyquist_period = ctx.T;
  m.frame_length = ctx.L;
  m.bits_in = ctx.B_in;
  m.sampler_bits = fe.sampler_bits[static_cast<std::size_t>(bits_index)];
  m.quantizer_range = s == System::Window ? fe.window_range : fe.multicoset_range;
  m.sampler_noise_bandwidth = ctx.mc_noise_bandwidth;
  return m;
}

// Sampled received pulse as seen by each front-end: the point sample at the
// symbol centre (multicoset) or the average over the symbol interval (WINDOW).
struct PulseResponse {
  std::vector<double> point;  // index m + k, m = -k .. k
  std::vector<double> average;
  int half = 0;
  int guard_left = 2;
  int guard_right = 2;
};

PulseResponse pulse_response(const ExperimentConfig& cfg, const PulseShape& pulse, int half) {
  const int osr = cfg.signal.oversampling;
  const double T = pulse.symbol_period();
  const std::vector<double> one{1.0};
  const DenseWaveform g = received(cfg, render_amplitudes(one, pulse, osr));

  PulseResponse r;
  r.half = half;
  double peak = 0.0;
  for (double v : g.samples) peak = std::max(peak, std::abs(v));
  long first = -1;
  long last = -1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.samples[i]) > 1e-9 * peak) {
      if (first < 0) first = static_cast<long>(i);
      last = static_cast<long>(i);
    }
  }
  if (first >= 0) {
    const double t_first = g.t0 + static_cast<double>(first) * g.dt;
    const double t_last = g.t0 + static_cast<double>(last + 1) * g.dt;
    r.guard_left = std::max(2, static_cast<int>(std::ceil(-t_first / T - 1e-9)) + 1);
    r.guard_right = std::max(2, static_cast<int>(std::ceil((t_last - T) / T - 1e-9)) + 1);
  }

  const long origin = std::lround(g.t0 / g.dt);
  const GridIntegrator integ(g.samples, osr, origin, g.t0, g.dt);
  for (int m = -half; m <= half; ++m) {
    const double c = m * T + 0.5 * T;
    const bool pin = c > g.t0 + 1.5 * g.dt && c < g.end_time() - 1.5 * g.dt;
    r.point.push_back(pin ? g.interpolate(c) : 0.0);
    const double a = m * T;
    const double b = a + T;
    const bool ain = a >= integ.begin() && b <= integ.end();
    r.average.push_back(ain ? integ.integral(a, b) / T : 0.0);
  }
  return r;
}

double estimate_signal_variance(const Context& ctx) {
  const auto& cfg = *ctx.cfg;
  const std::size_t count = 4096;
  const std::size_t total = count + static_cast<std::size_t>(ctx.guard_left + ctx.guard_right);
  const auto sym = generate_symbols(total, ctx.B_in, ctx.T, derive_seed(cfg.sweep.seed, {~0ULL, 1}));
  const DenseWaveform x = received(cfg, render_pam(sym, ctx.pulse, cfg.signal.oversampling));
  const double a = ctx.guard_left * ctx.T;
  const double b = (static_cast<double>(total) - ctx.guard_right) * ctx.T;
  double s = 0.0;
  double s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x.cell_center(i);
    if (t < a || t > b) continue;
    s += x.samples[i];
    s2 += x.samples[i] * x.samples[i];
    ++n;
  }
  const double mean = s / static_cast<double>(n);
  const double var = s2 / static_cast<double>(n) - mean * mean;
  if (!(var > 0.0)) throw NumericalError("received signal has zero variance");
  return var;
}

Context make_context(const ExperimentConfig& cfg) {
  Context ctx;
  ctx.cfg = &cfg;
  ctx.pulse = cfg.signal.pulse_shape();
  ctx.T = cfg.signal.symbol_period();
  ctx.L = cfg.frame_length();
  ctx.N = cfg.sweep.frames_per_trial;
  ctx.B_in = cfg.signal.bits_per_symbol;

  const int half = cfg.sweep.equalizer_order / 2;
  const PulseResponse resp = pulse_response(cfg, ctx.pulse, half);
  ctx.guard_left = resp.guard_left;
  ctx.guard_right = resp.guard_right;
  ctx.sigma_x2 = estimate_signal_variance(ctx);

  const bool want_window = std::find(cfg.systems.begin(), cfg.systems.end(), System::Window) != cfg.systems.end();
  if (want_window) ctx.bank = hadamard_bank(ctx.L, ctx.T);
  ctx.mc = MulticosetConfig::uniform(cfg.frontend.channels, ctx.T);
  ctx.mc.sampling_phase = cfg.frontend.sampling_phase;
  ctx.mc.lpf_bandwidth = cfg.frontend.lpf_bandwidth;
  ctx.mc.noise_bandwidth = cfg.frontend.noise_bandwidth;
  ctx.mc_noise_bandwidth = ctx.mc.effective_noise_bandwidth(ctx.T / cfg.signal.oversampling);

  for (double v : cfg.impairments.axis_values) {
    if (cfg.impairments.axis == SnrAxis::SnrDb) {
      ctx.snr_db.push_back(v);
      ctx.n0.push_back(ctx.sigma_x2 * ctx.T / std::pow(10.0, v / 10.0));
    } else {
      ctx.n0.push_back(v);
      ctx.snr_db.push_back(v > 0.0 ? 10.0 * std::log10(ctx.sigma_x2 * ctx.T / v)
                                   : std::numeric_limits<double>::infinity());
    }
  }

  const auto nb = static_cast<int>(cfg.frontend.sampler_bits.size());
  const auto nj = static_cast<int>(cfg.impairments.jitter.size());
  const auto na = static_cast<int>(ctx.n0.size());
  for (int s = 0; s < static_cast<int>(cfg.systems.size()); ++s)
    for (int b = 0; b < nb; ++b)
      for (int j = 0; j < nj; ++j)
        for (int a = 0; a < na; ++a) ctx.combos.push_back({s, b, j, a});

  if (cfg.sweep.measure_ber) {
    ctx.equalizers.resize(cfg.systems.size() * static_cast<std::size_t>(nb) * static_cast<std::size_t>(na));
    for (int s = 0; s < static_cast<int>(cfg.systems.size()); ++s) {
      const System sys = cfg.systems[static_cast<std::size_t>(s)];
      const auto& g = sys == System::Window ? resp.average : resp.point;
      const double T = ctx.T;
      auto fn = [&g, half, T](double t) {
        const long m = std::lround(t / T);
        return std::abs(m) <= half ? g[static_cast<std::size_t>(m + half)] : 0.0;
      };
      for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a) {
          const double snr = snr_theory(model_for(ctx, sys, b, a));
          ctx.equalizers[ctx.eq_index(s, b, a)] = build_equalizer(
              fn, cfg.sweep.equalizer_order, T, snr, ctx.sigma_x2, level_power(ctx.B_in));
        }
    }
  }
  return ctx;
}

std::vector<TrialStats> run_trial(const Context& ctx, int trial, const std::vector<char>& active) {
  const auto& cfg = *ctx.cfg;
  const std::uint64_t seed = derive_seed(cfg.sweep.seed, {static_cast<std::uint64_t>(trial)});
  const std::size_t nsym = static_cast<std::size_t>(ctx.N) * static_cast<std::size_t>(ctx.L);
  const std::size_t total = nsym + static_cast<std::size_t>(ctx.guard_left + ctx.guard_right);
  const SymbolStream sym = generate_symbols(total, ctx.B_in, ctx.T, derive_seed(seed, {1}));
  const DenseWaveform x = received(cfg, render_pam(sym, ctx.pulse, cfg.signal.oversampling));
  DenseWaveform zero = x;
  std::fill(zero.samples.begin(), zero.samples.end(), 0.0);
  zero.quadrature.clear();

  const double origin = ctx.guard_left * ctx.T;
  std::vector<double> truth(nsym);
  for (std::size_t k = 0; k < nsym; ++k) truth[k] = x.interpolate(origin + (static_cast<double>(k) + 0.5) * ctx.T);
  SymbolStream tx;
  tx.bits_per_symbol = ctx.B_in;
  tx.symbol_period = ctx.T;
  tx.levels.assign(sym.levels.begin() + ctx.guard_left, sym.levels.begin() + ctx.guard_left + static_cast<long>(nsym));

  std::vector<TrialStats> out(ctx.combos.size());
  const std::size_t edges = nsym + 1;
  const double Ts = ctx.T * ctx.L;
  const ClockOptions clock_opts{origin, static_cast<std::size_t>(ctx.L)};
  const std::uint64_t noise_seed = derive_seed(seed, {2});
  const std::uint64_t clock_seed = derive_seed(seed, {3});
  const int half = cfg.sweep.equalizer_order / 2;

  for (int s = 0; s < static_cast<int>(cfg.systems.size()); ++s) {
    const System sys = cfg.systems[static_cast<std::size_t>(s)];
    auto any_active = [&](int j) {
      for (std::size_t c = 0; c < ctx.combos.size(); ++c)
        if (active[c] && ctx.combos[c].system == s && (j < 0 || ctx.combos[c].jitter == j)) return true;
      return false;
    };
    if (!any_active(-1)) continue;

    // Unit-n0 noise contribution; the front-ends are linear before the quantizer.
    Eigen::MatrixXd y_noise;
    const ClockRealization ideal = ideal_clock(edges, ctx.T, Ts, origin);
    if (sys == System::Multicoset)
      y_noise = sample_multicoset(zero, ctx.mc, ideal, {1.0, noise_seed}, std::nullopt).y;

    for (int j = 0; j < static_cast<int>(cfg.impairments.jitter.size()); ++j) {
      if (!any_active(j)) continue;
      const double p = cfg.impairments.jitter[static_cast<std::size_t>(j)];
      const ClockRealization clock =
          p > 0.0 ? realize_clock(edges, ctx.T, Ts, p, clock_seed, clock_opts) : ideal;
      Eigen::MatrixXd y_sig;
      if (sys == System::Window) {
        y_sig = sample_window(x, *ctx.bank, clock, {0.0, 0}, std::nullopt).y;
        y_noise = sample_window(zero, *ctx.bank, clock, {1.0, noise_seed}, std::nullopt).y;
      } else {
        y_sig = sample_multicoset(x, ctx.mc, clock, {0.0, 0}, std::nullopt).y;
      }

      for (std::size_t c = 0; c < ctx.combos.size(); ++c) {
        const Combo& cb = ctx.combos[c];
        if (!active[c] || cb.system != s || cb.jitter != j) continue;
        TrialStats& st = out[c];
        st.reorders = clock.reorder_count;
        const double n0 = ctx.n0[static_cast<std::size_t>(cb.axis)];
        SampleFrames frames;
        frames.frame_period = Ts;
        frames.y = y_sig + std::sqrt(n0) * y_noise;
        if (const auto q = quantizer_for(ctx, sys, cb.bits)) {
          for (Eigen::Index i = 0; i < frames.y.size(); ++i) {
            double& v = frames.y.data()[i];
            if (is_overload(v, *q)) ++st.overloads;
            v = quantize(v, *q);
          }
        }
        std::vector<double> xhat = sys == System::Window ? recover_frames(frames, *ctx.bank).samples : interleave(frames);

        if (cfg.sweep.measure_mse) {
          double acc = 0.0;
          for (std::size_t k = 0; k < nsym; ++k) {
            const double d = xhat[k] - truth[k];
            acc += d * d;
          }
          st.sum_sq = acc;
          st.samples = nsym;
        }
        if (cfg.sweep.measure_ber) {
          const auto& eq = ctx.equalizers[ctx.eq_index(s, cb.bits, cb.axis)];
          const RecoveredStream rs{std::move(xhat), ctx.T};
          const SymbolStream rx = equalize_and_slice(rs, eq, ctx.B_in);
          for (std::size_t k = static_cast<std::size_t>(half); k + static_cast<std::size_t>(half) < nsym; ++k)
            st.errors += static_cast<std::uint64_t>(
                std::popcount(bit_label(tx.levels[k], ctx.B_in) ^ bit_label(rx.levels[k], ctx.B_in)));
          st.bits += (nsym - 2 * static_cast<std::size_t>(half)) * static_cast<std::size_t>(ctx.B_in);
        }
      }
    }
  }
  return out;
}

bool finished(const Accumulator& acc, const SweepConfig& sw) {
  if (acc.trials >= sw.max_trials) return true;
  if (acc.trials < sw.min_trials) return false;
  bool done = true;
  if (sw.measure_mse) {
    const double m = acc.mean();
    done = done && (m == 0.0 || acc.stderr_of_mean() < sw.target_rel_stderr * m);
  }
  if (sw.measure_ber) done = done && acc.errors >= static_cast<std::uint64_t>(sw.target_errors);
  return done;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const Context ctx = make_context(config);
  const auto& sw = config.sweep;

  std::vector<Accumulator> acc(ctx.combos.size());
  int next_trial = 0;
  while (true) {
    std::vector<char> active(acc.size());
    bool any = false;
    for (std::size_t c = 0; c < acc.size(); ++c) {
      active[c] = acc[c].active ? 1 : 0;
      any = any || acc[c].active;
    }
    if (!any) break;

    const int batch = sw.batch_trials;
    std::vector<std::vector<TrialStats>> results(static_cast<std::size_t>(batch));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int b = 0; b < batch; ++b) {
      try {
        results[static_cast<std::size_t>(b)] = run_trial(ctx, next_trial + b, active);
      } catch (...) {
#pragma omp critical(winsim_sweep_error)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    for (int b = 0; b < batch; ++b)
      for (std::size_t c = 0; c < acc.size(); ++c)
        if (active[c] && acc[c].trials < sw.max_trials) acc[c].add(results[static_cast<std::size_t>(b)][c]);
    for (auto& a : acc)
      if (a.active && finished(a, sw)) a.active = false;
    next_trial += batch;
  }

  SweepResult res;
  res.signal_variance = ctx.sigma_x2;
  res.sampler_noise_bandwidth = ctx.mc_noise_bandwidth;
  res.guard_left = ctx.guard_left;
  res.guard_right = ctx.guard_right;
  res.has_mse = sw.measure_mse;
  res.has_ber = sw.measure_ber;
  for (std::size_t c = 0; c < ctx.combos.size(); ++c) {
    const Combo& cb = ctx.combos[c];
    const Accumulator& a = acc[c];
    const System sys = config.systems[static_cast<std::size_t>(cb.system)];
    SweepPoint p;
    p.system = sys;
    p.snr_db = ctx.snr_db[static_cast<std::size_t>(cb.axis)];
    p.n0 = ctx.n0[static_cast<std::size_t>(cb.axis)];
    p.sampler_bits = config.frontend.sampler_bits[static_cast<std::size_t>(cb.bits)];
    p.jitter = config.impairments.jitter[static_cast<std::size_t>(cb.jitter)];
    p.trials = a.trials;
    p.samples = a.samples;
    p.overloads = a.overloads;
    p.reorders = a.reorders;
    const double snr = snr_theory(model_for(ctx, sys, cb.bits, cb.axis));
    p.mse_bound = std::isinf(snr) ? 0.0 : 1.0 / snr;
    if (sw.measure_mse) {
      p.mse = a.mean() / ctx.sigma_x2;
      p.mse_stderr = a.stderr_of_mean() / ctx.sigma_x2;
    }
    if (sw.measure_ber && a.bits > 0) {
      p.bit_errors = a.errors;
      p.bits = a.bits;
      p.ber = static_cast<double>(a.errors) / static_cast<double>(a.bits);
      p.ber_stderr = std::sqrt(p.ber * (1.0 - p.ber) / static_cast<double>(a.bits));
    }
    res.points.push_back(p);
  }
  return res;
}

}  // namespace winsim
