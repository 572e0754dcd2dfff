#include "raqr/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "raqr/config.hpp"
#include "raqr/constants.hpp"
#include "raqr/detuning_search.hpp"
#include "raqr/errors.hpp"
#include "raqr/network_simulator.hpp"
#include "raqr/version.hpp"

namespace raqr {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream os;
  os << "# raqr " << kVersion << " config_hash=" << std::hex << std::setw(16) << std::setfill('0')
     << config_hash << std::dec << " seed=" << seed;
  return os.str();
}

void write_curves_csv(std::ostream& os, const std::vector<CoverageCurve>& curves,
                      bool with_std_error) {
  os << "x_kind,x_value,receiver_mode,method,p_cov" << (with_std_error ? ",std_error" : "") << "\n";
  os << std::setprecision(10);
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      os << axis_name(c.axis) << ',' << p.x << ',' << c.receiver_mode << ',' << c.method << ','
         << p.p_cov;
      if (with_std_error) os << ',' << p.std_error;
      os << "\n";
    }
  }
}

std::vector<CurveRow> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::string line;
  std::vector<CurveRow> rows;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      if (cells.size() < 5 || cells[0] != "x_kind" || cells[1] != "x_value" ||
          cells[2] != "receiver_mode" || cells[3] != "method" || cells[4] != "p_cov")
        throw ConfigError(path + ": not a coverage curve CSV (schema mismatch)");
      header = true;
      continue;
    }
    if (cells.size() < 5)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected at least 5 columns");
    try {
      rows.push_back({cells[0], std::stod(cells[1]), cells[2], cells[3], std::stod(cells[4])});
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  if (!header) throw ConfigError(path + ": missing CSV header");
  return rows;
}

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string sweep;
  std::string values;
  std::string grid;
  std::string out = "out";
  std::optional<double> theta_db, density, ue_density, rho, max_gap;
  std::optional<int> mr;
  std::optional<long> trials;
  std::optional<std::uint64_t> seed;
  bool check = false;
  bool nonlinear = false;
  bool dump = false;
  std::vector<std::string> files;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> default_axis_values(AxisKind axis) {
  std::vector<double> v;
  switch (axis) {
    case AxisKind::theta_db:
      for (int t = -10; t <= 20; ++t) v.push_back(t);
      break;
    case AxisKind::density:
      for (int k = 0; k <= 32; ++k) v.push_back(1e-6 * std::pow(10.0, k / 8.0));
      break;
    case AxisKind::array_size:
      for (int m = 1; m <= 32; ++m) v.push_back(m);
      break;
  }
  return v;
}

// Output directory, manifest and stage timings for one run.
class RunContext {
 public:
  RunContext(std::string subcommand, const Flags& flags, RunConfig cfg,
             std::vector<std::string> overrides)
      : subcommand_(std::move(subcommand)),
        dir_(flags.out),
        cfg_(std::move(cfg)),
        overrides_(std::move(overrides)),
        start_(std::chrono::steady_clock::now()) {
    snapshot_ = config_text(cfg_);
    hash_ = fnv1a_64(snapshot_);
    fs::create_directories(dir_);
  }

  const RunConfig& cfg() const { return cfg_; }
  std::uint64_t hash() const { return hash_; }

  std::string header(std::uint64_t seed) const { return provenance_line(hash_, seed) + "\n"; }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f << content;
    outputs_.push_back(p.string());
  }

  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      timings_[name] += seconds_since(t0);
    } else {
      auto result = f();
      timings_[name] += seconds_since(t0);
      return result;
    }
  }

  void finish(std::uint64_t seed) {
    write("config.toml", snapshot_);
    json m;
    m["subcommand"] = subcommand_;
    m["version"] = kVersion;
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << hash_;
    m["config_hash"] = h.str();
    m["seed"] = seed;
    m["config_snapshot"] = (dir_ / "config.toml").string();
    m["overrides"] = overrides_;
    m["outputs"] = outputs_;
    json t;
    for (const auto& [k, v] : timings_) t[k] = v;
    t["total"] = seconds_since(start_);
    m["timings_s"] = t;
    const fs::path p = dir_ / "manifest.json";
    std::ofstream f(p, std::ios::binary);
    f << m.dump(2) << "\n";
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  std::string subcommand_;
  fs::path dir_;
  RunConfig cfg_;
  std::vector<std::string> overrides_;
  std::string snapshot_;
  std::uint64_t hash_ = 0;
  std::vector<std::string> outputs_;
  std::map<std::string, double> timings_;
  std::chrono::steady_clock::time_point start_;
};

RunConfig resolve_config(const std::string& sub, const Flags& f, std::vector<std::string>& echo) {
  RunConfig cfg = default_run_config();
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  const bool device = sub == "transducer" || sub == "optimize";
  if (!f.preset.empty()) {
    echo.push_back("--preset=" + f.preset);
    if (device) {
      cfg.atomic = atomic_profile(f.preset);
    } else {
      cfg.receivers.clear();
      for (const auto& name : split_list(f.preset)) cfg.receivers.push_back(receiver_from_name(name));
    }
  }
  if (!f.sweep.empty()) {
    echo.push_back("--sweep=" + f.sweep);
    cfg.sweep.axis = parse_axis(f.sweep);
    if (f.values.empty()) cfg.sweep.values = default_axis_values(cfg.sweep.axis);
  }
  if (!f.values.empty()) {
    echo.push_back("--values=" + f.values);
    cfg.sweep.values = parse_value_list(f.values);
  }
  if (f.theta_db) {
    echo.push_back("--theta-db=" + fmt(*f.theta_db));
    cfg.sweep.theta_db = *f.theta_db;
  }
  if (f.density) {
    echo.push_back("--density=" + fmt(*f.density));
    cfg.net.bs_density = *f.density;
  }
  if (f.ue_density) {
    echo.push_back("--ue-density=" + fmt(*f.ue_density));
    cfg.net.ue_density = *f.ue_density;
  }
  if (f.mr) {
    echo.push_back("--mr=" + std::to_string(*f.mr));
    cfg.net.array_size = *f.mr;
  }
  if (f.rho) {
    echo.push_back("--rho=" + fmt(*f.rho));
    cfg.net.correlation = *f.rho;
  }
  if (f.trials) {
    echo.push_back("--trials=" + std::to_string(*f.trials));
    cfg.sim.trials = *f.trials;
  }
  if (f.seed) {
    echo.push_back("--seed=" + std::to_string(*f.seed));
    cfg.sim.seed = *f.seed;
    cfg.search.seed = *f.seed;
  }
  if (f.max_gap) {
    echo.push_back("--max-gap=" + fmt(*f.max_gap));
    cfg.sim.max_gap = *f.max_gap;
  }
  if (f.nonlinear) {
    echo.push_back("--nonlinear");
    cfg.sim.nonlinear = true;
  }
  if (f.dump) {
    echo.push_back("--dump");
    cfg.sim.dump = true;
  }
  if (!f.grid.empty()) {
    echo.push_back("--grid=" + f.grid);
    const auto x = f.grid.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("grid");
      cfg.grid.n_probe = std::stoi(f.grid.substr(0, x));
      cfg.grid.n_coupling = std::stoi(f.grid.substr(x + 1));
    } catch (const std::exception&) {
      throw ConfigError("--grid expects NxM, got '" + f.grid + "'");
    }
  }
  // Re-validate the merged result.
  return parse_config("", "command line", cfg);
}

json triple_json(const DetuningTriple& d) {
  return json{{"delta_p_hz", d.probe / kTwoPi},
              {"delta_c_hz", d.coupling / kTwoPi},
              {"delta_lo_hz", d.lo / kTwoPi}};
}

json optimum_json(const RunConfig& cfg, const DetuningOptimum& opt,
                  const TransducerCoefficients& ref) {
  json j;
  j["species"] = cfg.atomic.species_label;
  j["optimum"] = triple_json(opt.search.optimum);
  j["abs_c1"] = std::abs(opt.coeffs.c1);
  j["abs_c3_over_c1"] = opt.coeffs.nonlinearity_ratio;
  j["linearity_radius_eps_0.05"] = linearity_radius(opt.coeffs, 0.05);
  j["locally_optimal"] = opt.search.locally_optimal;
  j["best_restart"] = opt.search.best_restart;
  j["n_starts"] = cfg.search.n_starts;
  json r = triple_json(ref.operating_point);
  r["abs_c1"] = std::abs(ref.c1);
  r["abs_c3_over_c1"] = ref.nonlinearity_ratio;
  j["reference"] = r;
  return j;
}

int cmd_device(const std::string& sub, const Flags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::string> echo;
  RunConfig resolved = resolve_config(sub, f, echo);
  RunContext run(sub, f, std::move(resolved), echo);
  const RunConfig& cfg = run.cfg();
  err << sub << ": multi-start search with " << cfg.search.n_starts << " restarts\n";
  const DetuningOptimum opt = run.stage("optimize", [&] { return optimize_detunings(cfg.atomic, cfg.search); });
  const TransducerCoefficients ref = run.stage("reference", [&] {
    return taylor_coefficients(cfg.atomic, DetuningTriple{0.0, 0.0, opt.search.optimum.lo});
  });
  if (sub == "transducer") {
    err << "transducer: scanning " << cfg.grid.n_probe << "x" << cfg.grid.n_coupling << " grid\n";
    const auto grid = GridSpec::uniform(cfg.grid.lower, cfg.grid.upper,
                                        static_cast<std::size_t>(cfg.grid.n_probe),
                                        static_cast<std::size_t>(cfg.grid.n_coupling),
                                        opt.search.optimum.lo);
    const LandscapeGrid land = run.stage("landscape", [&] { return scan_landscape(cfg.atomic, grid); });
    std::ostringstream csv;
    csv << run.header(cfg.search.seed);
    write_landscape_csv(csv, land);
    run.write("landscape.csv", csv.str());
  }
  run.write("optimum.json", optimum_json(cfg, opt, ref).dump(2) + "\n");
  run.finish(cfg.search.seed);
  const auto& o = opt.search.optimum;
  out << std::setprecision(6) << "optimum (MHz): dp=" << o.probe / kTwoPi / 1e6
      << " dc=" << o.coupling / kTwoPi / 1e6 << " dl=" << o.lo / kTwoPi / 1e6
      << "  |c1|=" << std::abs(opt.coeffs.c1) << "  |c3/c1|=" << opt.coeffs.nonlinearity_ratio
      << "\nreference (0,0): |c1|=" << std::abs(ref.c1) << "  |c3/c1|=" << ref.nonlinearity_ratio
      << "\n";
  return kExitOk;
}

int cmd_coverage(const Flags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::string> echo;
  RunConfig resolved = resolve_config("coverage", f, echo);
  RunContext run("coverage", f, std::move(resolved), echo);
  const RunConfig& cfg = run.cfg();
  std::vector<CoverageCurve> curves;
  for (const auto& spec : cfg.receivers) {
    err << "coverage: " << spec.name << " over " << cfg.sweep.values.size() << " points\n";
    curves.push_back(run.stage("analytic", [&] { return analytic_curve(cfg.net, to_receiver(spec), cfg.sweep); }));
  }
  std::ostringstream csv;
  csv << run.header(cfg.sim.seed);
  write_curves_csv(csv, curves, false);
  run.write("coverage.csv", csv.str());

  if (cfg.sweep.axis == AxisKind::density) {
    const auto [lo, hi] = std::minmax_element(cfg.sweep.values.begin(), cfg.sweep.values.end());
    json cj = json::array();
    const double theta = db_to_linear(cfg.sweep.theta_db);
    for (const auto& a : cfg.receivers) {
      if (a.conventional) continue;
      for (const auto& b : cfg.receivers) {
        if (!b.conventional) continue;
        json e{{"receiver_a", a.name}, {"receiver_b", b.name}, {"theta_db", cfg.sweep.theta_db}};
        try {
          const double x = run.stage("crossover", [&] {
            return crossover_density(cfg.net, to_receiver(a), to_receiver(b), theta, *lo, *hi);
          });
          e["crossover_density"] = x;
          out << "crossover " << a.name << " / " << b.name << " at " << cfg.sweep.theta_db
              << " dB: " << std::setprecision(4) << x << " m^-2\n";
        } catch (const NumericalError&) {
          e["crossover_density"] = nullptr;
          out << "crossover " << a.name << " / " << b.name << ": none in range\n";
        }
        cj.push_back(e);
      }
    }
    run.write("crossovers.json", cj.dump(2) + "\n");
  }
  run.finish(cfg.sim.seed);
  for (const auto& c : curves) {
    out << c.receiver_mode << ":";
    for (const auto& p : c.points) out << " " << std::setprecision(4) << p.p_cov;
    out << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::string> echo;
  RunConfig resolved = resolve_config("simulate", f, echo);
  RunContext run("simulate", f, std::move(resolved), echo);
  const RunConfig& cfg = run.cfg();
  if (cfg.sim.trials < 100) throw ConfigError("simulate needs at least 100 trials");

  std::vector<CoverageCurve> analytic, mc;
  struct Gap {
    std::string mode;
    double x;
    double a, m, se;
    bool checked;
  };
  std::vector<Gap> gaps;

  for (const auto& spec : cfg.receivers) {
    const Receiver rx = to_receiver(spec);
    const CoverageCurve an = run.stage("analytic", [&] { return analytic_curve(cfg.net, rx, cfg.sweep); });
    analytic.push_back(an);

    std::vector<std::pair<SimMode, std::string>> modes;
    if (spec.conventional) {
      modes.emplace_back(cfg.net.correlation > 0 ? SimMode::conventional_coupled : SimMode::conventional,
                         spec.name);
    } else {
      modes.emplace_back(SimMode::raqr_bussgang, spec.name);
      if (cfg.sim.nonlinear) modes.emplace_back(SimMode::raqr_nonlinear, spec.name + ":nonlinear");
    }
    for (const auto& [mode, label] : modes) {
      TrialConfig tc;
      tc.net = cfg.net;
      tc.mode = mode;
      tc.coeffs = spec.coeffs;
      tc.n_trials = cfg.sim.trials;
      tc.seed = cfg.sim.seed;
      tc.sampling_radius = cfg.sim.sampling_radius;
      tc.symbol_batch = cfg.sim.symbol_batch;
      tc.label = label;
      err << "simulate: " << label << " (" << sim_mode_name(mode) << "), " << tc.n_trials
          << " trials per point\n";
      CoverageCurve curve;
      if (cfg.sweep.axis == AxisKind::theta_db) {
        const auto outcomes = run.stage("monte_carlo", [&] { return run_trials(tc); });
        curve = {cfg.sweep.axis, label, "monte-carlo", {}};
        for (double x : cfg.sweep.values)
          curve.points.push_back(coverage_point(outcomes, db_to_linear(x), x));
        if (cfg.sim.dump) {
          std::ostringstream one;
          one << run.header(cfg.sim.seed);
          write_trial_dump(one, outcomes);
          std::string file = "trials_" + label + ".csv";
          std::replace(file.begin(), file.end(), ':', '_');
          run.write(file, one.str());
        }
      } else {
        curve = run.stage("monte_carlo", [&] { return estimate_coverage(tc, cfg.sweep); });
      }
      for (std::size_t i = 0; i < curve.points.size(); ++i)
        gaps.push_back({label, curve.points[i].x, an.points[i].p_cov, curve.points[i].p_cov,
                        curve.points[i].std_error, mode != SimMode::raqr_nonlinear});
      mc.push_back(std::move(curve));
    }
  }
  if (cfg.sim.dump && cfg.sweep.axis != AxisKind::theta_db)
    err << "simulate: per-trial dump is only written for theta sweeps\n";

  std::ostringstream csv_mc, csv_an, csv_gap;
  csv_mc << run.header(cfg.sim.seed);
  write_curves_csv(csv_mc, mc, true);
  csv_an << run.header(cfg.sim.seed);
  write_curves_csv(csv_an, analytic, false);
  csv_gap << run.header(cfg.sim.seed) << "x_kind,x_value,receiver_mode,analytic,monte_carlo,std_error,abs_gap\n"
          << std::setprecision(10);
  double max_gap = 0.0;
  json per_mode = json::object();
  std::map<std::string, std::pair<double, double>> worst;
  for (const auto& g : gaps) {
    const double d = std::abs(g.a - g.m);
    csv_gap << axis_name(cfg.sweep.axis) << ',' << g.x << ',' << g.mode << ',' << g.a << ',' << g.m
            << ',' << g.se << ',' << d << "\n";
    auto& w = worst[g.mode];
    if (d >= w.first) w = {d, g.x};
    if (g.checked) max_gap = std::max(max_gap, d);
  }
  for (const auto& [mode, w] : worst) per_mode[mode] = json{{"max_gap", w.first}, {"at_x", w.second}};
  run.write("monte_carlo.csv", csv_mc.str());
  run.write("analytic.csv", csv_an.str());
  run.write("gaps.csv", csv_gap.str());
  const bool pass = max_gap <= cfg.sim.max_gap;
  json report{{"max_gap", max_gap}, {"threshold", cfg.sim.max_gap}, {"pass", pass}, {"per_mode", per_mode}};
  run.write("gap_report.json", report.dump(2) + "\n");
  run.finish(cfg.sim.seed);

  out << "max |analytic - MC| = " << std::setprecision(4) << max_gap << " (threshold "
      << cfg.sim.max_gap << ")\n";
  for (const auto& [mode, w] : worst)
    out << "  " << mode << ": " << w.first << " at x=" << w.second << "\n";
  if (f.check && !pass) {
    err << "simulate: gap check failed\n";
    return kExitGap;
  }
  return kExitOk;
}

int cmd_compare(const Flags& f, std::ostream& out, std::ostream&) {
  if (f.files.size() != 2) throw ConfigError("compare expects exactly two CSV files");
  const auto a = read_curves_csv(f.files[0]);
  const auto b = read_curves_csv(f.files[1]);

  auto modes_of = [](const std::vector<CurveRow>& rows) {
    std::vector<std::string> m;
    for (const auto& r : rows)
      if (std::find(m.begin(), m.end(), r.receiver_mode) == m.end()) m.push_back(r.receiver_mode);
    return m;
  };
  const auto ma = modes_of(a), mb = modes_of(b);
  // Pair modes by name; two single-curve files are paired with each other.
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& m : ma)
    if (std::find(mb.begin(), mb.end(), m) != mb.end()) pairs.emplace_back(m, m);
  if (pairs.empty() && ma.size() == 1 && mb.size() == 1) pairs.emplace_back(ma[0], mb[0]);
  if (pairs.empty()) throw ConfigError("compare: no receiver modes in common");

  std::ostringstream csv;
  csv << "x_kind,x_value,mode_a,mode_b,p_a,p_b,delta\n" << std::setprecision(10);
  json jp = json::array();
  double max_gap = 0.0, sum_gap = 0.0;
  long n = 0;
  for (const auto& [pa, pb] : pairs) {
    std::vector<std::tuple<std::string, double, double, double>> pts;
    for (const auto& ra : a) {
      if (ra.receiver_mode != pa) continue;
      for (const auto& rb : b) {
        if (rb.receiver_mode != pb || rb.x_kind != ra.x_kind) continue;
        if (std::abs(rb.x_value - ra.x_value) > 1e-9 * std::max(1.0, std::abs(ra.x_value))) continue;
        if (!pts.empty() && std::get<0>(pts.back()) != ra.x_kind)
          throw ConfigError("compare: mixed axis kinds");
        pts.emplace_back(ra.x_kind, ra.x_value, ra.p_cov, rb.p_cov);
      }
    }
    if (pts.empty()) throw ConfigError("compare: no common points for " + pa + " / " + pb);
    double pmax = 0.0, psum = 0.0;
    json crossings = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& [k, x, p1, p2] = pts[i];
      const double d = p1 - p2;
      csv << k << ',' << x << ',' << pa << ',' << pb << ',' << p1 << ',' << p2 << ',' << d << "\n";
      pmax = std::max(pmax, std::abs(d));
      psum += std::abs(d);
      if (i > 0) {
        const auto& [k0, x0, q1, q2] = pts[i - 1];
        const double d0 = q1 - q2;
        if ((d0 < 0 && d > 0) || (d0 > 0 && d < 0))
          crossings.push_back(x0 + (x - x0) * d0 / (d0 - d));
      }
    }
    max_gap = std::max(max_gap, pmax);
    sum_gap += psum;
    n += static_cast<long>(pts.size());
    jp.push_back(json{{"mode_a", pa}, {"mode_b", pb}, {"max_gap", pmax},
                      {"mean_gap", psum / pts.size()}, {"crossings", crossings}});
    out << pa << " vs " << pb << ": max |delta| = " << std::setprecision(4) << pmax
        << ", mean = " << psum / pts.size() << ", crossings:";
    for (const auto& c : crossings) out << " " << c.get<double>();
    out << "\n";
  }
  json report{{"file_a", f.files[0]}, {"file_b", f.files[1]}, {"max_gap", max_gap},
              {"mean_gap", sum_gap / n}, {"pairs", jp}};
  fs::create_directories(f.out);
  std::ofstream(fs::path(f.out) / "compare.csv", std::ios::binary) << csv.str();
  std::ofstream(fs::path(f.out) / "compare.json", std::ios::binary) << report.dump(2) << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Config file (TOML-style key = value)");
  sub->add_option("--preset", f.preset,
                  "Receivers (comma list of cs_optimized, cs_resonant, rb_optimized, conventional) "
                  "or, for transducer/optimize, the atomic profile");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--out", f.out, "Output directory")->capture_default_str();
}

void add_network(CLI::App* sub, Flags& f) {
  sub->add_option("--sweep", f.sweep, "Sweep axis: theta, density or array");
  sub->add_option("--values", f.values, "Sweep values: start:stop:step or a comma list");
  sub->add_option("--theta-db", f.theta_db, "Threshold for density and array sweeps (dB)");
  sub->add_option("--density", f.density, "BS density lambda_b (m^-2)");
  sub->add_option("--ue-density", f.ue_density, "Interferer density lambda_u (m^-2); defaults to lambda_b");
  sub->add_option("--mr", f.mr, "Number of array elements");
  sub->add_option("--rho", f.rho, "Element correlation in [0, 1)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rydberg receiver coverage toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto* transducer = app.add_subcommand("transducer", "Detuning landscape and optimum");
  add_common(transducer, f);
  transducer->add_option("--grid", f.grid, "Landscape grid NxM");

  auto* optimize = app.add_subcommand("optimize", "Multi-start detuning optimization");
  add_common(optimize, f);

  auto* coverage = app.add_subcommand("coverage", "Analytic coverage curves");
  add_common(coverage, f);
  add_network(coverage, f);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage with gap report");
  add_common(simulate, f);
  add_network(simulate, f);
  simulate->add_option("--trials", f.trials, "Trials per point");
  simulate->add_flag("--check", f.check, "Exit with code 4 when the gap exceeds --max-gap");
  simulate->add_option("--max-gap", f.max_gap, "Gap threshold for --check");
  simulate->add_flag("--nonlinear", f.nonlinear, "Also simulate the exact cubic front end");
  simulate->add_flag("--dump", f.dump, "Write per-trial data (theta sweeps)");

  auto* compare = app.add_subcommand("compare", "Compare two coverage CSV files");
  compare->add_option("files", f.files, "Two CSV files")->expected(2);
  compare->add_option("--out", f.out, "Output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (transducer->parsed()) return cmd_device("transducer", f, out, err);
    if (optimize->parsed()) return cmd_device("optimize", f, out, err);
    if (coverage->parsed()) return cmd_coverage(f, out, err);
    if (simulate->parsed()) return cmd_simulate(f, out, err);
    if (compare->parsed()) return cmd_compare(f, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace raqr
