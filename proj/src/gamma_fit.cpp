#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "raqr/coverage_analytics.hpp"
#include "raqr/errors.hpp"
#include "raqr/numerics.hpp"

namespace raqr {

namespace {

constexpr int kGridPoints = 4001;

struct KsGrid {
  int m = 1;
  std::vector<double> x;
  std::vector<double> cdf;  // P(Mr, Mr x)
};

KsGrid make_grid(int m) {
  KsGrid g;
  g.m = m;
  g.x.resize(kGridPoints);
  g.cdf.resize(kGridPoints);
  const double lo = std::log(1e-4);
  const double hi = std::log(50.0 * m);
  for (int i = 0; i < kGridPoints; ++i) {
    g.x[i] = std::exp(lo + (hi - lo) * i / (kGridPoints - 1));
    g.cdf[i] = boost::math::gamma_p(static_cast<double>(m), m * g.x[i]);
  }
  return g;
}

double deviation(int m, double xi, double x) {
  const double fit = std::pow(-std::expm1(-xi * x), m);
  return std::abs(boost::math::gamma_p(static_cast<double>(m), m * x) - fit);
}

double sup_distance(const KsGrid& g, double xi) {
  std::size_t best = 0;
  double dmax = -1.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double d = std::abs(g.cdf[i] - std::pow(-std::expm1(-xi * g.x[i]), g.m));
    if (d > dmax) {
      dmax = d;
      best = i;
    }
  }
  const double a = g.x[best == 0 ? 0 : best - 1];
  const double b = g.x[std::min(best + 1, g.x.size() - 1)];
  auto neg = [&](double x) { return -deviation(g.m, xi, x); };
  const ScalarMinimum refined = golden_section_minimize(neg, a, b, 1e-12 * b);
  return std::max(dmax, -refined.value);
}

}  // namespace

double ks_sup_distance(int array_size, double xi) {
  if (array_size < 1) throw ConfigError("array size must be >= 1");
  return sup_distance(make_grid(array_size), xi);
}

double alzer_coefficient(int array_size) {
  if (array_size < 1) throw ConfigError("array size must be >= 1");
  const double m = array_size;
  return m * std::exp(-std::lgamma(m + 1.0) / m);
}

GammaApprox ks_fit(int array_size) {
  if (array_size < 1) throw ConfigError("array size must be >= 1");
  static std::mutex mutex;
  static std::map<int, GammaApprox> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(array_size);
    if (it != cache.end()) return it->second;
  }

  GammaApprox out;
  out.array_size = array_size;
  if (array_size > 1) {
    const KsGrid g = make_grid(array_size);
    // Coarse log scan for the basin, then golden section inside it.
    const double lo = 0.2;
    const double hi = 4.0 + 2.0 * std::log(static_cast<double>(array_size));
    constexpr int n = 240;
    std::vector<double> xs(n), ds(n);
    std::size_t best = 0;
    for (int i = 0; i < n; ++i) {
      xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
      ds[i] = sup_distance(g, xs[i]);
      if (ds[i] < ds[best]) best = static_cast<std::size_t>(i);
    }
    const double a = xs[best == 0 ? 0 : best - 1];
    const double b = xs[std::min<std::size_t>(best + 1, n - 1)];
    const ScalarMinimum m =
        golden_section_minimize([&](double xi) { return sup_distance(g, xi); }, a, b, 1e-9);
    out.ks_coefficient = m.x;
    out.sup_distance = m.value;
  }
  out.rate = out.ks_coefficient / array_size;

  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(array_size, out);
  return out;
}

}  // namespace raqr
