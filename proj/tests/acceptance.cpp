// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <omp.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "raqr/atomic_transducer.hpp"
#include "raqr/cli.hpp"
#include "raqr/config.hpp"
#include "raqr/constants.hpp"
#include "raqr/coverage_analytics.hpp"
#include "raqr/network_simulator.hpp"
#include "raqr/rf_frontend_stats.hpp"

using namespace raqr;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

NetworkConfig with_density(double lambda) {
  NetworkConfig net;
  net.bs_density = lambda;
  return net;
}

std::vector<double> theta_grid() {
  std::vector<double> v;
  for (int t = -10; t <= 20; ++t) v.push_back(t);
  return v;
}

double max_gap(const CoverageCurve& a, const CoverageCurve& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    g = std::max(g, std::abs(a.points[i].p_cov - b.points[i].p_cov));
  return g;
}

const DetuningTriple kCsOptimum{-kTwoPi * 10.128e6, kTwoPi * 8.687e6, kTwoPi * 0.0467e6};

// ---------------------------------------------------------------------------

void bussgang_sampling(Verdict& v) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_gain = 0.0, worst_dist = 0.0, worst_orth = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const double a1 = 0.05 + unit(rng);
    const cdouble c1 = std::polar(a1, kTwoPi * unit(rng));
    const double sigma2 = std::pow(10.0, -3.0 + 3.0 * unit(rng));
    // |c3| sigma^2 / |c1| up to 0.3 keeps kappa away from its null.
    const double load = 0.01 + 0.29 * unit(rng);
    const cdouble c3 = std::polar(load * a1 / sigma2, kTwoPi * unit(rng));
    TransducerCoefficients c;
    c.c1 = c1;
    c.c3 = c3;
    const BussgangTerms t = bussgang(c, sigma2);
    const auto e = oracle::bussgang_sampling(c1, c3, sigma2, 10'000'000, 1000 + draw);
    worst_gain = std::max(worst_gain, std::abs(e.gain - t.gain) / std::abs(t.gain));
    worst_dist = std::max(worst_dist, std::abs(e.distortion - t.distortion_variance) /
                                          t.distortion_variance);
    worst_orth = std::max(worst_orth, std::max(std::abs(e.orthogonality.real()),
                                               std::abs(e.orthogonality.imag())) /
                                          e.orthogonality_se);
  }
  const double elapsed = seconds_since(t0);
  v.detail << "kappa rel err " << worst_gain << ", sigma_d^2 rel err " << worst_dist
           << ", orthogonality " << worst_orth << " SE, " << elapsed << " s";
  v.require(worst_gain <= 0.01, "kappa within 1%");
  v.require(worst_dist <= 0.02, "sigma_d^2 within 2%");
  v.require(worst_orth <= 3.0, "orthogonality within 3 SE");
  v.require(elapsed < 60.0, "runtime under 1 min");
}

void laplace_transform(Verdict& v) {
  double worst = 0.0, coupled = 0.0;
  for (const double lambda : {1e-5, 1e-3}) {
    const NetworkConfig net = with_density(lambda);
    const double C = net.intercept();
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double r = 10.0 * std::pow(50.0, j / 9.0);
        // s spans SINR thresholds from -20 to +30 dB at this r.
        const double s = std::pow(10.0, -2.0 + 5.0 * i / 9.0) * std::pow(r, 4.0) / C;
        const double closed = interference_laplace(net, s, r);
        const double quad = interference_laplace_quadrature(net, s, r);
        worst = std::max(worst, std::abs(closed - quad) / std::max(quad, 1e-300));
        coupled = std::max(coupled, std::abs(interference_laplace(net, s, r, 1.0) - closed));
      }
    }
  }
  v.detail << "closed form vs quadrature rel err " << worst << ", mu_I=1 difference " << coupled;
  v.require(worst <= 1e-8, "closed form within 1e-8");
  v.require(coupled == 0.0, "mu_I = 1 reduces exactly");
}

void single_element_exactness(Verdict& v) {
  double worst = 0.0;
  const GammaApprox fit = ks_fit(1);
  for (const double lambda : {1e-5, 1e-4, 1e-3}) {
    NetworkConfig net = with_density(lambda);
    net.array_size = 1;
    const double noise = thermal_noise(net);
    const double C = net.intercept();
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        if (lambda != 1e-4 && (i + j) % 3 != 0) continue;
        const double theta = std::pow(10.0, (-10.0 + 30.0 * i / 9.0) / 10.0);
        const double r = 10.0 + 290.0 * j / 9.0;
        const double s = theta * std::pow(r, 4.0) / (net.p0 * C);
        const double direct = std::exp(-s * noise) * interference_laplace(net, s, r);
        const double p = conditional_coverage(net, noise, theta, r, fit);
        if (direct > 0.0) worst = std::max(worst, std::abs(p - direct) / direct);
      }
    }
  }
  v.detail << "max rel err " << worst << " (alpha_ks = " << fit.ks_coefficient << ")";
  v.require(fit.ks_coefficient == 1.0, "alpha_ks = 1");
  v.require(worst <= 1e-12, "exact to 1e-12");
}

void ks_fit_oracle(Verdict& v) {
  v.require(ks_fit(1).ks_coefficient == 1.0, "alpha_ks(1) = 1");
  for (const int m : {2, 4, 10}) {
    const GammaApprox fit = ks_fit(m);
    const double ref = oracle::ks_grid_search(m, 0.3, 6.0, 1e-4);
    const double alzer = alzer_coefficient(m);
    const double d_fit = ks_sup_distance(m, fit.ks_coefficient);
    const double d_alzer = ks_sup_distance(m, alzer);
    v.detail << "Mr=" << m << ": " << fit.ks_coefficient << " vs grid " << ref << ", D "
             << d_fit << " < Alzer " << d_alzer << "; ";
    v.require(std::abs(fit.ks_coefficient - ref) <= 2e-4, "grid oracle Mr=" + std::to_string(m));
    v.require(d_fit < d_alzer, "beats Alzer Mr=" + std::to_string(m));
  }
}

// Shared Monte Carlo runs for the sparse and dense theta sweeps.
struct TableOneRuns {
  std::map<std::string, CoverageCurve> mc, an;
};

TableOneRuns& table_one_runs() {
  static TableOneRuns runs = [] {
    TableOneRuns out;
    const SweepSpec sweep{AxisKind::theta_db, theta_grid(), 0.0};
    for (const double lambda : {1e-5, 1e-3}) {
      for (const std::string name : {"cs_optimized", "cs_resonant", "rb_optimized", "conventional"}) {
        TrialConfig cfg;
        cfg.net = with_density(lambda);
        cfg.n_trials = 30000;
        cfg.seed = 7;
        Receiver rx = Receiver::conventional();
        if (name == "conventional") {
          cfg.mode = SimMode::conventional;
        } else {
          cfg.mode = SimMode::raqr_bussgang;
          cfg.coeffs = coefficient_preset(name);
          rx = Receiver::raqr(cfg.coeffs, name);
        }
        const std::string key = name + "@" + (lambda == 1e-5 ? "1e-5" : "1e-3");
        out.mc[key] = estimate_coverage(cfg, sweep);
        out.an[key] = analytic_curve(cfg.net, rx, sweep);
      }
    }
    return out;
  }();
  return runs;
}

void table_one_gaps(Verdict& v) {
  const auto t0 = Clock::now();
  auto& runs = table_one_runs();
  double worst = 0.0;
  for (const std::string lambda : {"1e-5", "1e-3"}) {
    for (const std::string name : {"cs_optimized", "cs_resonant", "conventional"}) {
      const std::string key = name + "@" + lambda;
      const double g = max_gap(runs.mc[key], runs.an[key]);
      worst = std::max(worst, g);
      v.detail << key << " " << g << "; ";
    }
  }
  v.detail << "max " << worst << ", " << seconds_since(t0) << " s";
  v.require(worst <= 0.03, "max gap <= 0.03");
}

void crossovers(Verdict& v) {
  const NetworkConfig net;
  const Receiver cs = Receiver::raqr(coefficient_preset("cs_optimized"), "cs");
  const Receiver conv = Receiver::conventional();
  const double x0 = crossover_density(net, cs, conv, 1.0);
  const double x10 = crossover_density(net, cs, conv, 10.0);
  v.detail << "0 dB " << x0 << ", 10 dB " << x10;
  v.require(std::abs(x0 / 4.4e-5 - 1.0) <= 0.25, "0 dB within 25%");
  v.require(std::abs(x10 / 5.5e-5 - 1.0) <= 0.25, "10 dB within 25%");
  v.require(x10 > x0, "ordering");
}

void species_comparison(Verdict& v) {
  auto& runs = table_one_runs();
  const std::map<std::string, double> expected{
      {"cs_optimized@1e-5", 0.82}, {"rb_optimized@1e-5", 0.73}, {"conventional@1e-5", 0.61},
      {"cs_optimized@1e-3", 0.47}, {"rb_optimized@1e-3", 0.73}, {"conventional@1e-3", 0.87}};
  const std::size_t at5 = 15;  // theta grid starts at -10 dB
  for (const auto& [key, ref] : expected) {
    const double a = runs.an[key].points[at5].p_cov;
    const double m = runs.mc[key].points[at5].p_cov;
    v.detail << key << " " << a << "/" << m << "; ";
    v.require(std::abs(a - ref) <= 0.02, key + " analytic");
    v.require(std::abs(m - ref) <= 0.03, key + " MC");
  }
}

void array_scaling(Verdict& v) {
  NetworkConfig net = with_density(2e-4);
  const Receiver cs = Receiver::raqr(coefficient_preset("cs_optimized"), "cs");
  const Receiver conv = Receiver::conventional();
  int merge = -1;
  for (int m = 1; m <= 32; ++m) {
    net.array_size = m;
    if (std::abs(network_coverage(net, cs, 1.0) - network_coverage(net, conv, 1.0)) <= 0.02) {
      merge = m;
      break;
    }
  }
  net.array_size = 32;
  const double lead = network_coverage(net, conv, 10.0) - network_coverage(net, cs, 10.0);
  v.detail << "0 dB curves within 0.02 from Mr=" << merge << ", 10 dB lead at Mr=32 " << lead;
  v.require(merge >= 20 && merge <= 28, "merge near Mr 24");
  v.require(std::abs(lead - 0.053) <= 0.015, "lead 5.3% +- 1.5%");
}

void coupling(Verdict& v) {
  const SweepSpec sweep{AxisKind::theta_db, theta_grid(), 0.0};
  const double theta5 = db_to_linear(5.0);
  double worst = 0.0;
  std::map<double, double> outage;
  for (const double rho : {0.5, 0.7}) {
    TrialConfig cfg;
    cfg.net = with_density(1e-4);
    cfg.net.correlation = rho;
    cfg.mode = SimMode::conventional_coupled;
    cfg.n_trials = 30000;
    cfg.seed = 11;
    const CoverageCurve mc = estimate_coverage(cfg, sweep);
    const CoverageCurve an = analytic_curve(cfg.net, Receiver::conventional(), sweep);
    const double g = max_gap(mc, an);
    worst = std::max(worst, g);
    outage[rho] = 1.0 - network_coverage(cfg.net, Receiver::conventional(), theta5);
    v.detail << "rho=" << rho << " gap " << g << "; ";
  }
  const NetworkConfig plain = with_density(1e-4);
  const double o_unc = 1.0 - network_coverage(plain, Receiver::conventional(), theta5);
  const double o_raqr =
      1.0 - network_coverage(plain, Receiver::raqr(coefficient_preset("cs_optimized")), theta5);
  v.detail << "outage " << o_unc << " < " << o_raqr << " < " << outage[0.5] << " < "
           << outage[0.7];
  v.require(worst <= 0.05, "gap <= 0.05");
  v.require(o_unc < o_raqr && o_raqr < outage[0.5] && outage[0.5] < outage[0.7], "outage ordering");
}

void atomic_chain(Verdict& v) {
  const AtomicConfig base = cesium_profile();
  double ode = 0.0, herm = 0.0, trace = 0.0, min_eig = 0.0;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> det(-kTwoPi * 10e6, kTwoPi * 10e6);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::uniform_real_distribution<double> rf(0.0, 2.0);
  for (int draw = 0; draw <= 20; ++draw) {
    AtomicConfig cfg = base;
    DetuningTriple d = kCsOptimum;
    double omega = base.rabi_lo;
    if (draw > 0) {
      cfg.rabi_probe *= scale(rng);
      cfg.rabi_coupling *= scale(rng);
      d = {det(rng), det(rng), det(rng)};
      omega = rf(rng) * cfg.rabi_lo;
    }
    const DensityMatrix rho = steady_state(cfg, d, omega);
    ode = std::max(ode, (rho - oracle::propagated_steady_state(cfg, d, omega)).cwiseAbs().maxCoeff());
    herm = std::max(herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    trace = std::max(trace, std::abs(rho.trace() - 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  v.detail << "ODE " << ode << ", invariants " << std::max(herm, trace) << "/" << min_eig;
  v.require(ode <= 1e-8, "steady state vs ODE 1e-8");
  v.require(herm <= 1e-10 && trace <= 1e-10 && min_eig > -1e-9, "density-matrix invariants");

  double poly = 0.0;
  for (const double omega_lo : {1.0, 3.7, 25.0}) {
    auto curve = [&](double w) {
      const double x = w - omega_lo;
      return 2.0 + 3.0 * x + 5.0 * x * x * x;
    };
    const TransducerCoefficients c = taylor_coefficients(curve, omega_lo, 1.0);
    poly = std::max({poly, std::abs(c.a1 - 3.0) / 3.0, std::abs(c.a2) / 30.0,
                     std::abs(c.a3 - 30.0) / 30.0});
  }
  v.detail << ", polynomial " << poly;
  v.require(poly <= 1e-9, "polynomial derivatives 1e-9");

  double fft = 0.0;
  std::mt19937_64 r2(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 40; ++k) {
    TransducerCoefficients c;
    c.a0 = u(r2);
    c.a1 = u(r2);
    c.a2 = u(r2);
    c.a3 = u(r2);
    const double w = std::abs(u(r2));
    const double phase = u(r2);
    const cdouble env = fundamental_envelope(c, w, phase);
    fft = std::max(fft, std::abs(env - oracle::dft_fundamental(c.a0, c.a1, c.a2, c.a3, w, phase)) /
                            std::abs(env));
  }
  v.detail << ", FFT " << fft;
  v.require(fft <= 1e-9, "beat bin 1e-9");

  // Relative error of the linear model at the eps = 0.05 radius.
  const TransducerCoefficients c = taylor_coefficients(base, kCsOptimum);
  const double g = base.dipole_34 / PhysicalConstants::reduced_planck;
  auto curve = [&](double w) { return detector_voltage(base, kCsOptimum, w); };
  const double edge = std::sqrt(linearity_radius(c, 0.05));
  double at_edge = 0.0, inside = 0.0;
  for (const double f : {0.25, 0.5, 0.75, 1.0}) {
    const double W = f * edge * g;
    const double a = oracle::fundamental_bin(curve, base.rabi_lo, W).real();
    const double dev = std::abs(a - c.a1 * W) / std::abs(c.a1 * W);
    inside = std::max(inside, dev / (0.05 * f * f));
    if (f == 1.0) at_edge = dev;
  }
  v.detail << ", linear-model error at radius " << at_edge;
  v.require(std::abs(at_edge - 0.05) <= 0.01, "error at radius ~ 0.05");
  v.require(inside <= 1.2, "error grows as |u|^2 inside radius");
}

// Every subcommand at small sizes, once on one thread and once on four.
void determinism(Verdict& v) {
  const fs::path root = fs::temp_directory_path() / ("raqr_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path fast = root / "fast.toml";
  std::ofstream(fast) << "[search]\nn_starts = 4\n[grid]\nn_probe = 5\nn_coupling = 4\n";

  const std::vector<std::vector<std::string>> runs{
      {"transducer", "--config", fast.string()},
      {"optimize", "--config", fast.string(), "--preset", "rb_optimized"},
      {"coverage", "--sweep", "density", "--values", "1e-6,1e-5,1e-4,1e-3"},
      {"coverage", "--rho", "0.5", "--values", "-10:20:5"},
      {"simulate", "--trials", "2000", "--values", "-10:20:5", "--nonlinear", "--dump"},
      {"simulate", "--trials", "1000", "--sweep", "array", "--values", "1,4,8", "--theta-db", "5"},
      {"simulate", "--trials", "1000", "--rho", "0.7", "--values", "0,5"},
  };
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int compared = 0;
  std::vector<fs::path> firsts;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> dirs;
    for (const int threads : {1, 4}) {
      omp_set_num_threads(threads);
      const fs::path out = root / ("run" + std::to_string(i) + "_t" + std::to_string(threads));
      auto args = runs[i];
      args.insert(args.end(), {"--out", out.string()});
      std::ostringstream o, e;
      const int code = run_cli(args, o, e);
      v.require(code == 0, runs[i][0] + " exit " + std::to_string(code) + ": " + e.str());
      dirs.push_back(out);
    }
    // Rerun from the written snapshot as well.
    const fs::path again = root / ("run" + std::to_string(i) + "_snapshot");
    std::ostringstream o, e;
    const int code = run_cli({runs[i][0], "--config", (dirs[0] / "config.toml").string(), "--out",
                              again.string()},
                             o, e);
    v.require(code == 0, runs[i][0] + " snapshot rerun: " + e.str());
    const bool dump = std::find(runs[i].begin(), runs[i].end(), "--dump") != runs[i].end();
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.json") continue;
      const std::string ref = read(entry.path());
      v.require(ref == read(dirs[1] / name), runs[i][0] + " " + name + " differs across threads");
      ++compared;
      // The snapshot run carries its own flags, so only compare data files it also wrote.
      if (name != "config.toml" && fs::exists(again / name)) {
        v.require(ref == read(again / name), runs[i][0] + " " + name + " differs on rerun");
      } else if (name != "config.toml" && !(dump && name.rfind("trials_", 0) == 0)) {
        v.require(false, runs[i][0] + " rerun lacks " + name);
      }
    }
    firsts.push_back(dirs[0]);
  }
  // compare over two earlier outputs.
  for (const int threads : {1, 4}) {
    omp_set_num_threads(threads);
    std::ostringstream o, e;
    const fs::path out = root / ("compare_t" + std::to_string(threads));
    const int code = run_cli({"compare", (firsts[4] / "analytic.csv").string(),
                              (firsts[4] / "monte_carlo.csv").string(), "--out", out.string()},
                             o, e);
    v.require(code == 0, "compare exit");
  }
  for (const char* name : {"compare.csv", "compare.json"}) {
    v.require(read(root / "compare_t1" / name) == read(root / "compare_t4" / name),
              std::string("compare ") + name);
    ++compared;
  }
  v.detail << compared << " files byte-identical across 1 and 4 threads and snapshot reruns";
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"bussgang-sampling", bussgang_sampling},
      {"laplace-transform", laplace_transform},
      {"single-element-exactness", single_element_exactness},
      {"ks-gamma-fit", ks_fit_oracle},
      {"coverage-mc-gap", table_one_gaps},
      {"crossover-densities", crossovers},
      {"species-comparison", species_comparison},
      {"array-scaling", array_scaling},
      {"coupled-arrays", coupling},
      {"atomic-chain", atomic_chain},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), seconds_since(t0), v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
