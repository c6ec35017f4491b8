#include "winsim/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "winsim/errors.hpp"

namespace winsim {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string bits_text(const std::optional<int>& b) { return b ? std::to_string(*b) : "inf"; }

const char* pulse_name(PulseKind k) {
  switch (k) {
    case PulseKind::Rectangular: return "rectangular";
    case PulseKind::Led: return "led";
    case PulseKind::Gaussian: return "gaussian";
    case PulseKind::Laser: return "laser";
  }
  return "unknown";
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  json systems = json::array();
  for (auto s : c.systems) systems.push_back(to_string(s));
  j["systems"] = systems;
  j["seed"] = c.sweep.seed;
  j["signal"] = {{"pulse", pulse_name(c.signal.pulse)},
                 {"f_nyq_hz", c.signal.nyquist_rate},
                 {"bits_per_symbol", c.signal.bits_per_symbol},
                 {"oversampling", c.signal.oversampling},
                 {"led_time_constant_s", c.signal.led_time_constant},
                 {"gaussian_fwhm_s", c.signal.gaussian_fwhm},
                 {"laser_table", c.signal.laser_table},
                 {"laser_step_s", c.signal.laser_step}};
  const auto& f = c.channel.fiber;
  j["channel"] = {{"enabled", c.channel.enabled},
                  {"length_m", f.length_km * 1e3},
                  {"attenuation_db_per_m", f.attenuation_db_per_km / 1e3},
                  {"attenuation_mode", f.attenuation_mode == AttenuationMode::Field ? "field" : "intensity"},
                  {"dispersion_s_per_m2", f.dispersion_ps_per_nm_km * 1e-6},
                  {"wavelength_m", f.wavelength_nm * 1e-9},
                  {"beta0_rad", f.beta0},
                  {"beta1_s_per_m", f.beta1_s_per_km / 1e3}};
  json bits = json::array();
  for (const auto& b : c.frontend.sampler_bits) bits.push_back(b ? json(*b) : json("inf"));
  j["frontend"] = {{"channels", c.frontend.channels},
                   {"f_s_hz", c.frontend.sampling_rate},
                   {"frame_length", c.frame_length()},
                   {"sampler_bits", bits},
                   {"overload", c.frontend.overload == Overload::Saturate ? "saturate" : "unbounded"},
                   {"window_range_v_s", optional_json(c.frontend.window_range)},
                   {"multicoset_range_v", optional_json(c.frontend.multicoset_range)},
                   {"lpf_bandwidth_hz", optional_json(c.frontend.lpf_bandwidth)},
                   {"noise_bandwidth_hz", optional_json(c.frontend.noise_bandwidth)},
                   {"sampling_phase", c.frontend.sampling_phase}};
  j["impairments"] = {{"axis", c.impairments.axis == SnrAxis::SnrDb ? "snr_db" : "n0"},
                      {"axis_values", c.impairments.axis_values},
                      {"jitter_ui", c.impairments.jitter}};
  j["sweep"] = {{"mse", c.sweep.measure_mse},
                {"ber", c.sweep.measure_ber},
                {"frames_per_trial", c.sweep.frames_per_trial},
                {"min_trials", c.sweep.min_trials},
                {"max_trials", c.sweep.max_trials},
                {"batch_trials", c.sweep.batch_trials},
                {"target_rel_stderr", c.sweep.target_rel_stderr},
                {"target_errors", c.sweep.target_errors},
                {"equalizer_order", c.sweep.equalizer_order}};
  j["output"] = {{"plot_data", c.output.plot_data}};
  return j;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

std::string config_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(); }

std::string config_fingerprint(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> cols{
      "snr_db", "system",     "B_s",    "jitter_p", "n0",     "mse",       "mse_bound", "mse_stderr", "ber",
      "ber_stderr", "bit_errors", "bits", "trials",   "samples", "overloads", "reorders",  "config_hash"};
  return cols;
}

std::string results_csv(const SweepResult& result, const ExperimentConfig& cfg) {
  const std::string hash = config_fingerprint(cfg);
  std::ostringstream out;
  const auto& cols = results_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& p : result.points) {
    out << num(p.snr_db) << ',' << to_string(p.system) << ',' << bits_text(p.sampler_bits) << ',' << num(p.jitter)
        << ',' << num(p.n0) << ',';
    if (result.has_mse) out << num(p.mse) << ',' << num(p.mse_bound) << ',' << num(p.mse_stderr) << ',';
    else out << ",," << num(p.mse_bound) << ',';
    if (result.has_ber) out << num(p.ber) << ',' << num(p.ber_stderr) << ',' << p.bit_errors << ',' << p.bits << ',';
    else out << ",,,,";
    out << p.trials << ',' << p.samples << ',' << p.overloads << ',' << p.reorders << ',' << hash << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_outputs(const SweepResult& result, const ExperimentConfig& cfg,
                                                 const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const std::string hash = config_fingerprint(cfg);

  written.push_back(dir / "results.csv");
  write_file(written.back(), results_csv(result, cfg));

  json meta;
  meta["config"] = to_json(cfg);
  meta["config_hash"] = hash;
  meta["seed"] = cfg.sweep.seed;
  meta["version"] = WINSIM_VERSION;
  meta["snr_axis"] = {
      {"definition", "SNR = sigma_x^2 / (N0 * f_nyq), thermal noise only, per Nyquist band"},
      {"conversion", "N0 = sigma_x^2 * T / 10^(snr_db / 10), T = 1 / f_nyq"},
      {"sigma_x2", "variance of the noiseless received waveform, estimated from a 4096-symbol pilot block"}};
  meta["signal_variance"] = result.signal_variance;
  meta["multicoset_noise_bandwidth_hz"] = result.sampler_noise_bandwidth;
  meta["noise_model"] = {
      {"window", "white noise of density N0 integrated with the signal; recovered thermal variance N0 / T"},
      {"multicoset", "per-sample thermal variance N0 * B, B = multicoset_noise_bandwidth_hz"}};
  meta["mse"] = "mean square error between recovered and true Nyquist samples (x(kT + T/2)), divided by sigma_x^2";
  meta["mse_bound"] = "1 / SNR from the closed-form expression for each system";
  meta["bit_mapping"] = cfg.signal.bits_per_symbol == 1 ? "natural binary" : "gray";
  meta["guard_symbols"] = {result.guard_left, result.guard_right};
  meta["columns"] = results_columns();
  written.push_back(dir / "meta.json");
  write_file(written.back(), meta.dump(2) + "\n");

  if (cfg.output.plot_data) {
    const fs::path pdir = dir / "plot";
    fs::create_directories(pdir);
    std::map<std::string, std::ostringstream> files;
    std::vector<std::string> order;
    for (const auto& p : result.points) {
      const std::string name =
          std::string(to_string(p.system)) + "_bs" + bits_text(p.sampler_bits) + "_p" + num(p.jitter) + ".dat";
      auto [it, inserted] = files.try_emplace(name);
      if (inserted) {
        order.push_back(name);
        it->second << "# config_hash " << hash << "\n# system " << to_string(p.system) << "  B_s "
                   << bits_text(p.sampler_bits) << "  jitter_p " << num(p.jitter)
                   << "\n# snr_db mse mse_bound mse_stderr ber ber_stderr\n";
      }
      it->second << num(p.snr_db) << ' ' << (result.has_mse ? num(p.mse) : "nan") << ' ' << num(p.mse_bound) << ' '
                 << (result.has_mse ? num(p.mse_stderr) : "nan") << ' ' << (result.has_ber ? num(p.ber) : "nan")
                 << ' ' << (result.has_ber ? num(p.ber_stderr) : "nan") << '\n';
    }
    for (const auto& name : order) {
      written.push_back(pdir / name);
      write_file(written.back(), files[name].str());
    }
  }
  return written;
}

}  // namespace winsim
