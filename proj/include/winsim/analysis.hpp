#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winsim/fiber_channel.hpp"
#include "winsim/impairments.hpp"
#include "winsim/waveform.hpp"

namespace winsim {

enum class System { Window, Multicoset };

const char* to_string(System s);

/// Parameters of the closed-form SNR expressions. `sampler_bits` unset means
/// an ideal (unquantized) sampler. `quantizer_range` overrides the default
/// dynamic range (2^B_in T_s for WINDOW, 2^B_in for multicoset).
/// `sampler_noise_bandwidth` is the noise-equivalent bandwidth B of a
/// pointwise sampler: its thermal variance is n0 * B (1 keeps n0 as a variance).
struct SnrModel {
  System system = System::Window;
  double signal_variance = 1.0;
  double n0 = 0.0;
  double nyquist_period = 1.0;
  int frame_length = 1;
  int bits_in = 1;
  std::optional<int> sampler_bits;
  std::optional<double> quantizer_range;
  double sampler_noise_bandwidth = 1.0;

  void validate() const;
};

/// sigma_x^2 / (n0 / T + 2^{2(B_in - B_s)} L / 12).
double snr_window(const SnrModel& m);
/// sigma_x^2 / (n0 B + 2^{2(B_in - B_s)} / 12).
double snr_multicoset(const SnrModel& m);
/// Dispatches on m.system.
double snr_theory(const SnrModel& m);

double mse(std::span<const double> a, std::span<const double> b);

/// Bit label of a level index: natural binary for OOK, Gray otherwise.
unsigned bit_label(int level, int bits_per_symbol);
std::size_t bit_errors(const SymbolStream& tx, const SymbolStream& rx);
double ber(const SymbolStream& tx, const SymbolStream& rx);

enum class SnrAxis { SnrDb, N0 };

struct SignalConfig {
  PulseKind pulse = PulseKind::Rectangular;
  double nyquist_rate = 0.0;  // Hz
  int bits_per_symbol = 1;
  int oversampling = 32;
  double led_time_constant = 0.0;  // s
  double gaussian_fwhm = 0.0;      // s
  std::vector<double> laser_table;
  double laser_step = 0.0;  // s

  double symbol_period() const { return 1.0 / nyquist_rate; }
  PulseShape pulse_shape() const;
};

struct ChannelConfig {
  bool enabled = false;
  FiberParams fiber;
};

struct FrontendConfig {
  int channels = 8;
  double sampling_rate = 0.0;  // Hz
  /// Unset entries mean an ideal sampler.
  std::vector<std::optional<int>> sampler_bits{std::optional<int>{8}};
  Overload overload = Overload::Saturate;
  std::optional<double> window_range;      // V s
  std::optional<double> multicoset_range;  // V
  std::optional<double> lpf_bandwidth;     // Hz
  std::optional<double> noise_bandwidth;   // Hz
  double sampling_phase = 0.5;
};

struct ImpairmentConfig {
  SnrAxis axis = SnrAxis::SnrDb;
  /// SNR in dB, or n0 in V^2 s, depending on `axis`.
  std::vector<double> axis_values;
  /// Cycle-to-cycle RMS jitter as a fraction of T.
  std::vector<double> jitter{0.0};
};

struct SweepConfig {
  bool measure_mse = true;
  bool measure_ber = false;
  int frames_per_trial = 256;
  int min_trials = 4;
  int max_trials = 64;
  int batch_trials = 4;
  double target_rel_stderr = 0.05;
  long target_errors = 100;
  int equalizer_order = 3;
  std::uint64_t seed = 1;
};

struct OutputConfig {
  bool plot_data = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<System> systems{System::Window, System::Multicoset};
  SignalConfig signal;
  ChannelConfig channel;
  FrontendConfig frontend;
  ImpairmentConfig impairments;
  SweepConfig sweep;
  OutputConfig output;

  /// L = f_Nyq / f_s (rounded); validate() checks it is integral.
  int frame_length() const;
  /// Every problem found, empty when valid.
  std::vector<std::string> validation_errors() const;
  /// Throws ConfigError listing all problems.
  void validate() const;
};

struct SweepPoint {
  System system = System::Window;
  double snr_db = 0.0;
  double n0 = 0.0;
  std::optional<int> sampler_bits;
  double jitter = 0.0;

  /// Normalized MSE (mean square recovery error / sigma_x^2).
  double mse = 0.0;
  double mse_stderr = 0.0;
  /// 1 / SNR from the closed-form expression.
  double mse_bound = 0.0;
  double ber = 0.0;
  double ber_stderr = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t samples = 0;
  int trials = 0;
  std::uint64_t overloads = 0;
  std::uint64_t reorders = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double signal_variance = 0.0;
  double sampler_noise_bandwidth = 0.0;
  int guard_left = 0;
  int guard_right = 0;
  bool has_mse = true;
  bool has_ber = false;
};

/// Monte-Carlo sweep over systems x sampler bits x jitter x SNR. Every trial
/// draws its symbols, noise and clock from seeds derived from (master seed,
/// trial index), shared by all sweep points (common random numbers). Trials
/// run in fixed batches; a point stops once it has min_trials and meets its
/// precision target (relative MSE standard error and/or bit-error count), or
/// at max_trials. The result depends only on the config.
SweepResult run_sweep(const ExperimentConfig& config);

}  // namespace winsim
