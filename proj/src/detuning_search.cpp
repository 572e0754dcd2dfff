#include "raqr/detuning_search.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "raqr/errors.hpp"
#include "raqr/nelder_mead.hpp"
#include "raqr/rng.hpp"

namespace raqr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

DetuningTriple to_triple(const Eigen::VectorXd& x) { return {x[0], x[1], x[2]}; }

Eigen::VectorXd to_vector(const DetuningTriple& d) {
  Eigen::VectorXd x(3);
  x << d.probe, d.coupling, d.lo;
  return x;
}

double safe_eval(const DetuningObjective& objective, const DetuningTriple& d) {
  try {
    double v = objective(d);
    return std::isfinite(v) ? v : kNegInf;
  } catch (const NumericalError&) {
    return kNegInf;
  }
}

RestartRecord run_restart(const DetuningObjective& objective, const SearchSpec& spec,
                          std::size_t index) {
  auto eng = stream_engine(spec.seed, index);
  std::uniform_real_distribution<double> u(spec.lower, spec.upper);
  RestartRecord rec;
  rec.start = {u(eng), u(eng), u(eng)};

  NelderMeadOptions opts;
  opts.lower = Eigen::VectorXd::Constant(3, spec.lower);
  opts.upper = Eigen::VectorXd::Constant(3, spec.upper);
  opts.x_tolerance = spec.tolerance;
  opts.max_iterations = spec.max_iterations;
  auto neg = [&](const Eigen::VectorXd& x) { return -safe_eval(objective, to_triple(x)); };
  NelderMeadResult r = nelder_mead_minimize(neg, to_vector(rec.start), opts);
  rec.optimum = to_triple(r.x);
  rec.objective = -r.value;
  rec.converged = r.converged;
  rec.evaluations = r.evaluations;
  return rec;
}

// Probes +-tolerance along each axis; restarts Nelder-Mead from any better
// probe. Returns true once no probe improves.
bool polish(const DetuningObjective& objective, const SearchSpec& spec, RestartRecord& best) {
  NelderMeadOptions opts;
  opts.lower = Eigen::VectorXd::Constant(3, spec.lower);
  opts.upper = Eigen::VectorXd::Constant(3, spec.upper);
  opts.x_tolerance = spec.tolerance;
  opts.max_iterations = spec.max_iterations;
  opts.initial_step = 4.0 * spec.tolerance;
  auto neg = [&](const Eigen::VectorXd& x) { return -safe_eval(objective, to_triple(x)); };

  for (int round = 0; round < 8; ++round) {
    Eigen::VectorXd x = to_vector(best.optimum);
    bool improved = false;
    for (int axis = 0; axis < 3 && !improved; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        Eigen::VectorXd p = x;
        p[axis] += sign * spec.tolerance;
        p = project_to_box(p, opts.lower, opts.upper);
        double v = safe_eval(objective, to_triple(p));
        if (v > best.objective) {
          NelderMeadResult r = nelder_mead_minimize(neg, p, opts);
          best.optimum = to_triple(r.x);
          best.objective = std::max(-r.value, v);
          if (-r.value < v) best.optimum = to_triple(p);
          improved = true;
          break;
        }
      }
    }
    if (!improved) return true;
  }
  return false;
}

SearchResult assemble(const DetuningObjective& objective, const SearchSpec& spec,
                      std::vector<RestartRecord> restarts) {
  SearchResult out;
  out.restarts = std::move(restarts);
  double best = kNegInf;
  bool any = false;
  for (std::size_t i = 0; i < out.restarts.size(); ++i) {
    if (out.restarts[i].objective > best) {
      best = out.restarts[i].objective;
      out.best_restart = i;
      any = true;
    }
  }
  if (!any) throw ConvergenceError("detuning search: every restart failed");
  RestartRecord winner = out.restarts[out.best_restart];
  out.locally_optimal = polish(objective, spec, winner);
  out.optimum = winner.optimum;
  out.objective = winner.objective;
  return out;
}

}  // namespace

void SearchSpec::validate() const {
  if (!(lower < upper)) throw ConfigError("search: lower bound must be below upper bound");
  if (n_starts < 1) throw ConfigError("search: n_starts must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("search: tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("search: max_iterations must be positive");
}

SearchResult multi_start_maximize_serial(const DetuningObjective& objective,
                                         const SearchSpec& spec) {
  spec.validate();
  std::vector<RestartRecord> restarts(static_cast<std::size_t>(spec.n_starts));
  for (std::size_t i = 0; i < restarts.size(); ++i) restarts[i] = run_restart(objective, spec, i);
  return assemble(objective, spec, std::move(restarts));
}

SearchResult multi_start_maximize(const DetuningObjective& objective, const SearchSpec& spec) {
  spec.validate();
  const long n = spec.n_starts;
  std::vector<RestartRecord> restarts(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i)
    restarts[static_cast<std::size_t>(i)] = run_restart(objective, spec, static_cast<std::size_t>(i));
  return assemble(objective, spec, std::move(restarts));
}

DetuningOptimum optimize_detunings(const AtomicConfig& cfg, const SearchSpec& spec) {
  cfg.validate();
  auto objective = [&cfg](const DetuningTriple& d) {
    return std::abs(taylor_coefficients(cfg, d).c1);
  };
  DetuningOptimum out;
  out.search = multi_start_maximize(objective, spec);
  out.coeffs = taylor_coefficients(cfg, out.search.optimum);
  return out;
}

GridSpec GridSpec::uniform(double lo, double hi, std::size_t n_probe, std::size_t n_coupling,
                           double lo_detuning) {
  if (n_probe < 1 || n_coupling < 1) throw ConfigError("grid: axes need at least one point");
  auto axis = [&](std::size_t n) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i)
      a[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return a;
  };
  return {axis(n_probe), axis(n_coupling), lo_detuning};
}

namespace {

LandscapeCell evaluate_cell(const AtomicConfig& cfg, double dp, double dc, double dl) {
  LandscapeCell cell;
  try {
    auto c = taylor_coefficients(cfg, {dp, dc, dl});
    cell.abs_c1 = std::abs(c.c1);
    cell.abs_c3_over_c1 = c.nonlinearity_ratio;
    cell.valid = std::isfinite(cell.abs_c1) && std::isfinite(cell.abs_c3_over_c1);
  } catch (const NumericalError&) {
    cell.valid = false;
  }
  if (!cell.valid) {
    cell.abs_c1 = std::numeric_limits<double>::quiet_NaN();
    cell.abs_c3_over_c1 = std::numeric_limits<double>::quiet_NaN();
  }
  return cell;
}

LandscapeGrid empty_grid(const GridSpec& grid) {
  LandscapeGrid out;
  out.probe_axis = grid.probe_axis;
  out.coupling_axis = grid.coupling_axis;
  out.lo_detuning = grid.lo_detuning;
  out.cells.resize(grid.probe_axis.size() * grid.coupling_axis.size());
  return out;
}

}  // namespace

LandscapeGrid scan_landscape_serial(const AtomicConfig& cfg, const GridSpec& grid) {
  cfg.validate();
  LandscapeGrid out = empty_grid(grid);
  const std::size_t nc = grid.coupling_axis.size();
  for (std::size_t k = 0; k < out.cells.size(); ++k)
    out.cells[k] = evaluate_cell(cfg, grid.probe_axis[k / nc], grid.coupling_axis[k % nc],
                                 grid.lo_detuning);
  return out;
}

LandscapeGrid scan_landscape(const AtomicConfig& cfg, const GridSpec& grid) {
  cfg.validate();
  LandscapeGrid out = empty_grid(grid);
  const long n = static_cast<long>(out.cells.size());
  const std::size_t nc = grid.coupling_axis.size();
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < n; ++k) {
    auto i = static_cast<std::size_t>(k);
    out.cells[i] = evaluate_cell(cfg, grid.probe_axis[i / nc], grid.coupling_axis[i % nc],
                                 grid.lo_detuning);
  }
  return out;
}

void write_landscape_csv(std::ostream& os, const LandscapeGrid& grid) {
  os << "delta_p_hz,delta_c_hz,abs_c1,abs_c3_over_c1\n";
  os << std::setprecision(10);
  for (std::size_t i = 0; i < grid.probe_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.coupling_axis.size(); ++j) {
      const auto& c = grid.at(i, j);
      os << grid.probe_axis[i] / kTwoPi << ',' << grid.coupling_axis[j] / kTwoPi << ',';
      if (c.valid)
        os << c.abs_c1 << ',' << c.abs_c3_over_c1 << '\n';
      else
        os << "nan,nan\n";
    }
  }
}

}  // namespace raqr
