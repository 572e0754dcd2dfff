#include "raqr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "raqr/errors.hpp"

namespace raqr {

TransducerCoefficients coefficient_preset(const std::string& name) {
  if (name == "cs_optimized") return TransducerCoefficients::from_magnitudes(0.327, 281.0, kPi);
  if (name == "cs_resonant") return TransducerCoefficients::from_magnitudes(0.198, 38.0, kPi);
  if (name == "rb_optimized") return TransducerCoefficients::from_magnitudes(0.192, 81.0, kPi);
  throw ConfigError("unknown coefficient preset '" + name +
                    "' (expected cs_optimized, cs_resonant or rb_optimized)");
}

std::vector<std::string> coefficient_preset_names() {
  return {"cs_optimized", "cs_resonant", "rb_optimized"};
}

AtomicConfig atomic_profile(const std::string& name) {
  if (name == "cesium" || name == "cs" || name.rfind("cs_", 0) == 0) return cesium_profile();
  if (name == "rubidium" || name == "rb" || name.rfind("rb_", 0) == 0) return rubidium_profile();
  throw ConfigError("unknown atomic profile '" + name + "' (expected cesium or rubidium)");
}

ReceiverSpec receiver_from_name(const std::string& name) {
  ReceiverSpec spec;
  spec.name = name;
  if (name == "conventional") {
    spec.conventional = true;
    return spec;
  }
  spec.coeffs = coefficient_preset(name);
  return spec;
}

Receiver to_receiver(const ReceiverSpec& spec) {
  if (spec.conventional) return Receiver::conventional(spec.name);
  return Receiver::raqr(spec.coeffs, spec.name);
}

RunConfig default_run_config() {
  RunConfig cfg;
  for (int t = -10; t <= 20; ++t) cfg.sweep.values.push_back(t);
  cfg.receivers = {receiver_from_name("cs_optimized"), receiver_from_name("conventional")};
  return cfg;
}

std::uint64_t fnv1a_64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("expected a number, got '" + t + "'");
  return v;
}

long to_long(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError("expected an integer, got '" + s + "'");
  return static_cast<long>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct CustomCoeffs {
  double abs_c1 = 0.327;
  double ratio = 281.0;
  double phase = kPi;
};

std::map<std::string, Setter> make_setters(CustomCoeffs& custom) {
  std::map<std::string, Setter> s;
  auto net = [&s](const std::string& key, double NetworkConfig::*field) {
    s["network." + key] = [field](RunConfig& c, const std::string& v) { c.net.*field = to_double(v); };
  };
  net("bs_density", &NetworkConfig::bs_density);
  net("p0", &NetworkConfig::p0);
  net("pu", &NetworkConfig::pu);
  net("pathloss_exponent", &NetworkConfig::pathloss_exponent);
  net("min_distance", &NetworkConfig::min_distance);
  net("carrier_freq", &NetworkConfig::carrier_freq);
  net("bandwidth", &NetworkConfig::bandwidth);
  net("photodetection_variance", &NetworkConfig::photodetection_variance);
  net("sys_temp", &NetworkConfig::sys_temp);
  net("noise_figure", &NetworkConfig::noise_figure);
  net("correlation", &NetworkConfig::correlation);
  s["network.noise_figure_db"] = [](RunConfig& c, const std::string& v) {
    c.net.noise_figure = db_to_linear(to_double(v));
  };
  s["network.ue_density"] = [](RunConfig& c, const std::string& v) { c.net.ue_density = to_double(v); };
  s["network.pathloss_intercept"] = [](RunConfig& c, const std::string& v) {
    c.net.pathloss_intercept = to_double(v);
  };
  s["network.array_size"] = [](RunConfig& c, const std::string& v) {
    c.net.array_size = static_cast<int>(to_long(v));
  };

  s["atomic.profile"] = [](RunConfig& c, const std::string& v) { c.atomic = atomic_profile(v); };
  s["atomic.species_label"] = [](RunConfig& c, const std::string& v) { c.atomic.species_label = v; };
  auto atom = [&s](const std::string& key, double AtomicConfig::*field) {
    s["atomic." + key] = [field](RunConfig& c, const std::string& v) { c.atomic.*field = to_double(v); };
  };
  atom("probe_wavelength", &AtomicConfig::probe_wavelength);
  atom("decay_rate", &AtomicConfig::decay_rate);
  atom("rabi_probe", &AtomicConfig::rabi_probe);
  atom("rabi_coupling", &AtomicConfig::rabi_coupling);
  atom("rabi_lo", &AtomicConfig::rabi_lo);
  atom("dipole_12", &AtomicConfig::dipole_12);
  atom("dipole_34", &AtomicConfig::dipole_34);
  atom("number_density", &AtomicConfig::number_density);
  atom("cell_length", &AtomicConfig::cell_length);
  atom("probe_power_in", &AtomicConfig::probe_power_in);
  atom("probe_phase_in", &AtomicConfig::probe_phase_in);
  atom("reference_power", &AtomicConfig::reference_power);
  atom("responsivity", &AtomicConfig::responsivity);
  atom("lna_gain", &AtomicConfig::lna_gain);
  atom("transit_rate", &AtomicConfig::transit_rate);

  s["search.lower"] = [](RunConfig& c, const std::string& v) { c.search.lower = to_double(v); };
  s["search.upper"] = [](RunConfig& c, const std::string& v) { c.search.upper = to_double(v); };
  s["search.n_starts"] = [](RunConfig& c, const std::string& v) {
    c.search.n_starts = static_cast<int>(to_long(v));
  };
  s["search.tolerance"] = [](RunConfig& c, const std::string& v) { c.search.tolerance = to_double(v); };
  s["search.max_iterations"] = [](RunConfig& c, const std::string& v) {
    c.search.max_iterations = static_cast<int>(to_long(v));
  };
  s["search.seed"] = [](RunConfig& c, const std::string& v) {
    c.search.seed = static_cast<std::uint64_t>(to_long(v));
  };

  s["grid.lower"] = [](RunConfig& c, const std::string& v) { c.grid.lower = to_double(v); };
  s["grid.upper"] = [](RunConfig& c, const std::string& v) { c.grid.upper = to_double(v); };
  s["grid.n_probe"] = [](RunConfig& c, const std::string& v) { c.grid.n_probe = static_cast<int>(to_long(v)); };
  s["grid.n_coupling"] = [](RunConfig& c, const std::string& v) {
    c.grid.n_coupling = static_cast<int>(to_long(v));
  };

  s["simulation.trials"] = [](RunConfig& c, const std::string& v) { c.sim.trials = to_long(v); };
  s["simulation.seed"] = [](RunConfig& c, const std::string& v) {
    c.sim.seed = static_cast<std::uint64_t>(to_long(v));
  };
  s["simulation.sampling_radius"] = [](RunConfig& c, const std::string& v) {
    c.sim.sampling_radius = to_double(v);
  };
  s["simulation.symbol_batch"] = [](RunConfig& c, const std::string& v) {
    c.sim.symbol_batch = static_cast<int>(to_long(v));
  };
  s["simulation.nonlinear"] = [](RunConfig& c, const std::string& v) { c.sim.nonlinear = to_bool(v); };
  s["simulation.dump"] = [](RunConfig& c, const std::string& v) { c.sim.dump = to_bool(v); };
  s["simulation.max_gap"] = [](RunConfig& c, const std::string& v) { c.sim.max_gap = to_double(v); };

  s["sweep.axis"] = [](RunConfig& c, const std::string& v) { c.sweep.axis = parse_axis(v); };
  s["sweep.values"] = [](RunConfig& c, const std::string& v) { c.sweep.values = parse_value_list(v); };
  s["sweep.theta_db"] = [](RunConfig& c, const std::string& v) { c.sweep.theta_db = to_double(v); };

  s["receivers.names"] = [](RunConfig& c, const std::string& v) {
    c.receivers.clear();
    for (const auto& n : split(v, ',')) {
      if (n == "custom") {
        c.receivers.push_back({"custom", {}, false});
      } else {
        c.receivers.push_back(receiver_from_name(n));
      }
    }
  };
  s["custom.abs_c1"] = [&custom](RunConfig&, const std::string& v) { custom.abs_c1 = to_double(v); };
  s["custom.abs_c3_over_c1"] = [&custom](RunConfig&, const std::string& v) { custom.ratio = to_double(v); };
  s["custom.c3_phase"] = [&custom](RunConfig&, const std::string& v) { custom.phase = to_double(v); };
  return s;
}

void validate_run(const RunConfig& c) {
  c.net.validate();
  c.atomic.validate();
  c.search.validate();
  if (!(c.grid.lower <= c.grid.upper)) throw ConfigError("grid: lower must not exceed upper");
  if (c.grid.n_probe < 1 || c.grid.n_coupling < 1) throw ConfigError("grid: sizes must be >= 1");
  if (c.sim.trials < 1) throw ConfigError("simulation.trials must be >= 1");
  if (c.sim.symbol_batch < 1) throw ConfigError("simulation.symbol_batch must be >= 1");
  if (c.sweep.values.empty()) throw ConfigError("sweep.values is empty");
  if (c.receivers.empty()) throw ConfigError("receivers.names is empty");
}

}  // namespace

std::vector<double> parse_value_list(const std::string& text) {
  const std::string t = trim(unquote(trim(text)));
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("range must read start:stop:step, got '" + t + "'");
    const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0) || b < a) throw ConfigError("range needs step > 0 and stop >= start");
    const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  for (const auto& p : split(t, ',')) out.push_back(to_double(p));
  if (out.empty()) throw ConfigError("empty value list");
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& source, RunConfig base) {
  CustomCoeffs custom;
  for (const auto& r : base.receivers)
    if (r.name == "custom") {
      custom.abs_c1 = std::abs(r.coeffs.c1);
      custom.ratio = r.coeffs.nonlinearity_ratio;
      custom.phase = std::arg(r.coeffs.c3) - std::arg(r.coeffs.c1);
    }
  const auto setters = make_setters(custom);
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters.find(full);
    if (it == setters.end()) throw ConfigError(where + "unknown key '" + full + "'");
    try {
      it->second(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + full + ": " + e.what());
    }
  }
  for (auto& r : base.receivers)
    if (r.name == "custom")
      r.coeffs = TransducerCoefficients::from_magnitudes(custom.abs_c1, custom.ratio, custom.phase);
  try {
    validate_run(base);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, std::move(base));
}

void write_config(std::ostream& os, const RunConfig& c) {
  const auto& n = c.net;
  os << "[network]\n";
  os << "bs_density = " << num(n.bs_density) << "\n";
  if (n.ue_density) os << "ue_density = " << num(*n.ue_density) << "\n";
  os << "p0 = " << num(n.p0) << "\n";
  os << "pu = " << num(n.pu) << "\n";
  os << "pathloss_exponent = " << num(n.pathloss_exponent) << "\n";
  if (n.pathloss_intercept) os << "pathloss_intercept = " << num(*n.pathloss_intercept) << "\n";
  os << "min_distance = " << num(n.min_distance) << "\n";
  os << "array_size = " << n.array_size << "\n";
  os << "carrier_freq = " << num(n.carrier_freq) << "\n";
  os << "bandwidth = " << num(n.bandwidth) << "\n";
  os << "photodetection_variance = " << num(n.photodetection_variance) << "\n";
  os << "sys_temp = " << num(n.sys_temp) << "\n";
  os << "noise_figure = " << num(n.noise_figure) << "\n";
  os << "correlation = " << num(n.correlation) << "\n";

  const auto& a = c.atomic;
  os << "\n[atomic]\n";
  os << "species_label = \"" << a.species_label << "\"\n";
  os << "probe_wavelength = " << num(a.probe_wavelength) << "\n";
  os << "decay_rate = " << num(a.decay_rate) << "\n";
  os << "rabi_probe = " << num(a.rabi_probe) << "\n";
  os << "rabi_coupling = " << num(a.rabi_coupling) << "\n";
  os << "rabi_lo = " << num(a.rabi_lo) << "\n";
  os << "dipole_12 = " << num(a.dipole_12) << "\n";
  os << "dipole_34 = " << num(a.dipole_34) << "\n";
  os << "number_density = " << num(a.number_density) << "\n";
  os << "cell_length = " << num(a.cell_length) << "\n";
  os << "probe_power_in = " << num(a.probe_power_in) << "\n";
  os << "probe_phase_in = " << num(a.probe_phase_in) << "\n";
  os << "reference_power = " << num(a.reference_power) << "\n";
  os << "responsivity = " << num(a.responsivity) << "\n";
  os << "lna_gain = " << num(a.lna_gain) << "\n";
  os << "transit_rate = " << num(a.transit_rate) << "\n";

  os << "\n[search]\n";
  os << "lower = " << num(c.search.lower) << "\n";
  os << "upper = " << num(c.search.upper) << "\n";
  os << "n_starts = " << c.search.n_starts << "\n";
  os << "tolerance = " << num(c.search.tolerance) << "\n";
  os << "max_iterations = " << c.search.max_iterations << "\n";
  os << "seed = " << c.search.seed << "\n";

  os << "\n[grid]\n";
  os << "lower = " << num(c.grid.lower) << "\n";
  os << "upper = " << num(c.grid.upper) << "\n";
  os << "n_probe = " << c.grid.n_probe << "\n";
  os << "n_coupling = " << c.grid.n_coupling << "\n";

  os << "\n[simulation]\n";
  os << "trials = " << c.sim.trials << "\n";
  os << "seed = " << c.sim.seed << "\n";
  os << "sampling_radius = " << num(c.sim.sampling_radius) << "\n";
  os << "symbol_batch = " << c.sim.symbol_batch << "\n";
  os << "nonlinear = " << (c.sim.nonlinear ? "true" : "false") << "\n";
  os << "dump = " << (c.sim.dump ? "true" : "false") << "\n";
  os << "max_gap = " << num(c.sim.max_gap) << "\n";

  os << "\n[sweep]\n";
  os << "axis = " << axis_name(c.sweep.axis) << "\n";
  os << "values = ";
  for (std::size_t i = 0; i < c.sweep.values.size(); ++i)
    os << (i ? ", " : "") << num(c.sweep.values[i]);
  os << "\n";
  os << "theta_db = " << num(c.sweep.theta_db) << "\n";

  os << "\n[receivers]\nnames = ";
  const ReceiverSpec* custom = nullptr;
  for (std::size_t i = 0; i < c.receivers.size(); ++i) {
    os << (i ? ", " : "") << c.receivers[i].name;
    if (c.receivers[i].name == "custom") custom = &c.receivers[i];
  }
  os << "\n";
  if (custom) {
    os << "\n[custom]\n";
    os << "abs_c1 = " << num(std::abs(custom->coeffs.c1)) << "\n";
    os << "abs_c3_over_c1 = " << num(custom->coeffs.nonlinearity_ratio) << "\n";
    os << "c3_phase = " << num(std::arg(custom->coeffs.c3) - std::arg(custom->coeffs.c1)) << "\n";
  }
}

std::string config_text(const RunConfig& cfg) {
  std::ostringstream os;
  write_config(os, cfg);
  return os.str();
}

}  // namespace raqr
