#include "winsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "winsim/units.hpp"

namespace winsim {

namespace detail {
struct PresetEntry {
  const char* name;
  const char* text;
};
extern const PresetEntry kPresets[];
extern const std::size_t kPresetCount;
}  // namespace detail

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  return msg;
}

class Reader {
public:
  std::vector<std::string> errors;

  void error(const std::string& key, const std::string& what) { errors.push_back(key + ": " + what); }

  // Rejects keys not in `allowed`.
  void check_keys(const YAML::Node& node, const std::string& prefix, std::initializer_list<const char*> allowed) {
    if (!node || !node.IsMap()) return;
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) error(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }

  YAML::Node section(const YAML::Node& root, const char* name) {
    const YAML::Node n = root[name];
    if (!n || n.IsNull()) return YAML::Node();
    if (!n.IsMap()) {
      error(name, "must be a mapping");
      return YAML::Node();
    }
    return n;
  }

  template <class F>
  void with_scalar(const YAML::Node& node, const std::string& key, bool required, F&& f) {
    if (!node) {
      if (required) error(key, "required field is missing");
      return;
    }
    if (!node.IsScalar()) {
      error(key, "must be a scalar");
      return;
    }
    try {
      f(node.Scalar());
    } catch (const std::exception& e) {
      error(key, e.what());
    }
  }

  void quantity(const YAML::Node& node, const std::string& key, Dimension dim, double& out, bool required = false) {
    with_scalar(node, key, required, [&](const std::string& s) { out = parse_quantity(s, dim); });
  }

  void optional_quantity(const YAML::Node& node, const std::string& key, Dimension dim, std::optional<double>& out) {
    with_scalar(node, key, false, [&](const std::string& s) {
      if (s == "auto") out.reset();
      else out = parse_quantity(s, dim);
    });
  }

  void integer(const YAML::Node& node, const std::string& key, int& out, bool required = false) {
    with_scalar(node, key, required, [&](const std::string& s) { out = to_int(s); });
  }

  void number(const YAML::Node& node, const std::string& key, double& out) {
    with_scalar(node, key, false, [&](const std::string& s) { out = parse_quantity(s, Dimension::Dimensionless); });
  }

  void boolean(const YAML::Node& node, const std::string& key, bool& out) {
    with_scalar(node, key, false, [&](const std::string& s) {
      if (s == "true" || s == "yes" || s == "on") out = true;
      else if (s == "false" || s == "no" || s == "off") out = false;
      else throw ConfigError("expected true or false, got '" + s + "'");
    });
  }

  // A scalar or a sequence of scalars, each passed to f.
  template <class F>
  void list(const YAML::Node& node, const std::string& key, bool required, F&& f) {
    if (!node) {
      if (required) error(key, "required field is missing");
      return;
    }
    if (node.IsScalar()) {
      with_scalar(node, key, false, f);
      return;
    }
    if (!node.IsSequence()) {
      error(key, "must be a value or a list");
      return;
    }
    if (node.size() == 0) error(key, "list is empty");
    for (std::size_t i = 0; i < node.size(); ++i) with_scalar(node[i], key + "[" + std::to_string(i) + "]", true, f);
  }

  static int to_int(const std::string& s) {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw ConfigError("expected an integer, got '" + s + "'");
    return static_cast<int>(v);
  }
};

// snr_db: [0, 5, 10] | 10 | {from: 0, to: 30, step: 5}
std::vector<double> read_axis(Reader& r, const YAML::Node& node, const std::string& key, Dimension dim) {
  std::vector<double> out;
  if (node && node.IsMap()) {
    r.check_keys(node, key, {"from", "to", "step"});
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    r.quantity(node["from"], key + ".from", dim, from, true);
    r.quantity(node["to"], key + ".to", dim, to, true);
    r.quantity(node["step"], key + ".step", dim, step, true);
    if (!(step > 0.0) || to < from) {
      r.error(key, "range needs step > 0 and to >= from");
      return out;
    }
    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(from + static_cast<double>(i) * step);
    return out;
  }
  r.list(node, key, false, [&](const std::string& s) { out.push_back(parse_quantity(s, dim)); });
  return out;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  Reader r;
  ExperimentConfig cfg;
  if (root && !root.IsNull() && !root.IsMap()) throw ConfigErrors({"top level must be a mapping"});

  r.check_keys(root, "", {"name", "systems", "seed", "signal", "channel", "frontend", "impairments", "sweep", "output"});
  r.with_scalar(root["name"], "name", false, [&](const std::string& s) { cfg.name = s; });

  cfg.systems.clear();
  r.list(root["systems"], "systems", true, [&](const std::string& s) {
    if (s == "window") cfg.systems.push_back(System::Window);
    else if (s == "multicoset") cfg.systems.push_back(System::Multicoset);
    else throw ConfigError("unknown system '" + s + "' (window, multicoset)");
  });
  r.with_scalar(root["seed"], "seed", true, [&](const std::string& s) {
    std::size_t used = 0;
    cfg.sweep.seed = std::stoull(s, &used);
    if (used != s.size()) throw ConfigError("expected a non-negative integer");
  });

  // signal
  {
    const YAML::Node n = r.section(root, "signal");
    r.check_keys(n, "signal", {"pulse", "f_nyq", "bits_per_symbol", "oversampling", "led_time_constant",
                               "gaussian_fwhm", "laser_table", "laser_step"});
    r.with_scalar(n["pulse"], "signal.pulse", true, [&](const std::string& s) {
      if (s == "rectangular") cfg.signal.pulse = PulseKind::Rectangular;
      else if (s == "led") cfg.signal.pulse = PulseKind::Led;
      else if (s == "gaussian") cfg.signal.pulse = PulseKind::Gaussian;
      else if (s == "laser") cfg.signal.pulse = PulseKind::Laser;
      else throw ConfigError("unknown pulse '" + s + "' (rectangular, led, gaussian, laser)");
    });
    r.quantity(n["f_nyq"], "signal.f_nyq", Dimension::Frequency, cfg.signal.nyquist_rate, true);
    r.integer(n["bits_per_symbol"], "signal.bits_per_symbol", cfg.signal.bits_per_symbol, true);
    r.integer(n["oversampling"], "signal.oversampling", cfg.signal.oversampling);
    r.quantity(n["led_time_constant"], "signal.led_time_constant", Dimension::Time, cfg.signal.led_time_constant);
    r.quantity(n["gaussian_fwhm"], "signal.gaussian_fwhm", Dimension::Time, cfg.signal.gaussian_fwhm);
    r.quantity(n["laser_step"], "signal.laser_step", Dimension::Time, cfg.signal.laser_step);
    if (n && n["laser_table"])
      r.list(n["laser_table"], "signal.laser_table", false, [&](const std::string& s) {
        cfg.signal.laser_table.push_back(parse_quantity(s, Dimension::Dimensionless));
      });
  }

  // channel
  {
    const YAML::Node n = r.section(root, "channel");
    cfg.channel.enabled = n.IsMap();
    r.check_keys(n, "channel", {"enabled", "length", "attenuation", "attenuation_mode", "dispersion", "wavelength",
                                "beta0", "beta1"});
    if (n.IsMap()) {
      auto& f = cfg.channel.fiber;
      r.boolean(n["enabled"], "channel.enabled", cfg.channel.enabled);
      double length_m = 0.0;
      r.quantity(n["length"], "channel.length", Dimension::Length, length_m, true);
      f.length_km = length_m / 1e3;
      double att = f.attenuation_db_per_km / 1e3;
      r.quantity(n["attenuation"], "channel.attenuation", Dimension::Attenuation, att);
      f.attenuation_db_per_km = att * 1e3;
      r.with_scalar(n["attenuation_mode"], "channel.attenuation_mode", false, [&](const std::string& s) {
        if (s == "field") f.attenuation_mode = AttenuationMode::Field;
        else if (s == "intensity") f.attenuation_mode = AttenuationMode::Intensity;
        else throw ConfigError("expected field or intensity");
      });
      double disp = f.dispersion_ps_per_nm_km * 1e-6;
      r.quantity(n["dispersion"], "channel.dispersion", Dimension::Dispersion, disp);
      f.dispersion_ps_per_nm_km = disp / 1e-6;
      double wl = f.wavelength_nm * 1e-9;
      r.quantity(n["wavelength"], "channel.wavelength", Dimension::Length, wl);
      f.wavelength_nm = wl / 1e-9;
      r.quantity(n["beta0"], "channel.beta0", Dimension::Angle, f.beta0);
      double b1 = f.beta1_s_per_km / 1e3;
      r.quantity(n["beta1"], "channel.beta1", Dimension::DelayPerLength, b1);
      f.beta1_s_per_km = b1 * 1e3;
    }
  }

  // frontend
  {
    const YAML::Node n = r.section(root, "frontend");
    r.check_keys(n, "frontend", {"channels", "f_s", "sampler_bits", "overload", "window_range", "multicoset_range",
                                 "lpf_bandwidth", "noise_bandwidth", "sampling_phase"});
    auto& fe = cfg.frontend;
    r.integer(n["channels"], "frontend.channels", fe.channels, true);
    r.quantity(n["f_s"], "frontend.f_s", Dimension::Frequency, fe.sampling_rate, true);
    fe.sampler_bits.clear();
    r.list(n["sampler_bits"], "frontend.sampler_bits", true, [&](const std::string& s) {
      if (s == "inf" || s == "none") fe.sampler_bits.emplace_back();
      else fe.sampler_bits.emplace_back(Reader::to_int(s));
    });
    r.with_scalar(n["overload"], "frontend.overload", false, [&](const std::string& s) {
      if (s == "saturate") fe.overload = Overload::Saturate;
      else if (s == "unbounded") fe.overload = Overload::Unbounded;
      else throw ConfigError("expected saturate or unbounded");
    });
    r.optional_quantity(n["window_range"], "frontend.window_range", Dimension::VoltSeconds, fe.window_range);
    r.optional_quantity(n["multicoset_range"], "frontend.multicoset_range", Dimension::Voltage, fe.multicoset_range);
    r.optional_quantity(n["lpf_bandwidth"], "frontend.lpf_bandwidth", Dimension::Frequency, fe.lpf_bandwidth);
    r.optional_quantity(n["noise_bandwidth"], "frontend.noise_bandwidth", Dimension::Frequency, fe.noise_bandwidth);
    r.number(n["sampling_phase"], "frontend.sampling_phase", fe.sampling_phase);
  }

  // impairments
  {
    const YAML::Node n = r.section(root, "impairments");
    r.check_keys(n, "impairments", {"snr_db", "n0", "jitter"});
    auto& im = cfg.impairments;
    const bool has_snr = n && n["snr_db"];
    const bool has_n0 = n && n["n0"];
    if (has_snr && has_n0) r.error("impairments", "give either snr_db or n0, not both");
    if (!has_snr && !has_n0) r.error("impairments.snr_db", "required field is missing (or give impairments.n0)");
    if (has_n0) {
      im.axis = SnrAxis::N0;
      im.axis_values = read_axis(r, n["n0"], "impairments.n0", Dimension::NoiseDensity);
    } else if (has_snr) {
      im.axis = SnrAxis::SnrDb;
      im.axis_values = read_axis(r, n["snr_db"], "impairments.snr_db", Dimension::Dimensionless);
    }
    if (n && n["jitter"]) {
      im.jitter.clear();
      r.list(n["jitter"], "impairments.jitter", false,
             [&](const std::string& s) { im.jitter.push_back(parse_quantity(s, Dimension::Dimensionless)); });
    }
  }

  // sweep
  {
    const YAML::Node n = r.section(root, "sweep");
    r.check_keys(n, "sweep", {"metrics", "frames_per_trial", "min_trials", "max_trials", "batch_trials",
                              "target_rel_stderr", "target_errors", "equalizer_order"});
    auto& sw = cfg.sweep;
    if (n && n["metrics"]) {
      sw.measure_mse = false;
      sw.measure_ber = false;
      r.list(n["metrics"], "sweep.metrics", false, [&](const std::string& s) {
        if (s == "mse") sw.measure_mse = true;
        else if (s == "ber") sw.measure_ber = true;
        else throw ConfigError("unknown metric '" + s + "' (mse, ber)");
      });
    }
    r.integer(n["frames_per_trial"], "sweep.frames_per_trial", sw.frames_per_trial);
    r.integer(n["min_trials"], "sweep.min_trials", sw.min_trials);
    r.integer(n["max_trials"], "sweep.max_trials", sw.max_trials);
    r.integer(n["batch_trials"], "sweep.batch_trials", sw.batch_trials);
    r.number(n["target_rel_stderr"], "sweep.target_rel_stderr", sw.target_rel_stderr);
    int target = static_cast<int>(sw.target_errors);
    r.integer(n["target_errors"], "sweep.target_errors", target);
    sw.target_errors = target;
    r.integer(n["equalizer_order"], "sweep.equalizer_order", sw.equalizer_order);
  }

  // output
  {
    const YAML::Node n = r.section(root, "output");
    r.check_keys(n, "output", {"plot_data"});
    r.boolean(n["plot_data"], "output.plot_data", cfg.output.plot_data);
  }

  // Semantic checks, skipping fields that already failed to parse.
  const std::size_t parsed = r.errors.size();
  for (auto& e : cfg.validation_errors()) {
    const auto key = e.substr(0, e.find(':'));
    bool seen = false;
    for (std::size_t i = 0; i < parsed; ++i)
      if (r.errors[i].rfind(key, 0) == 0) seen = true;
    if (!seen) r.errors.push_back(std::move(e));
  }
  if (!r.errors.empty()) throw ConfigErrors(std::move(r.errors));
  return cfg;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> errors) : ConfigError(join(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigErrors({std::string(source) + ": " + e.what()});
  }
  return from_yaml(root);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigErrors({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kPresetCount; ++i) out.emplace_back(detail::kPresets[i].name);
  return out;
}

std::string_view preset_text(std::string_view name) {
  for (std::size_t i = 0; i < detail::kPresetCount; ++i)
    if (name == detail::kPresets[i].name) return detail::kPresets[i].text;
  std::string msg = "unknown preset '" + std::string(name) + "'; available:";
  for (const auto& n : preset_names()) msg += " " + n;
  throw ConfigError(msg);
}

ExperimentConfig load_preset(std::string_view name) {
  return parse_config_text(preset_text(name), std::string("preset ") + std::string(name));
}

}  // namespace winsim
