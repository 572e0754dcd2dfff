#include "raqr/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "raqr/errors.hpp"

namespace raqr {

Eigen::VectorXd project_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& start,
                                      const NelderMeadOptions& opts) {
  const Eigen::Index n = start.size();
  if (opts.lower.size() != n || opts.upper.size() != n) {
    throw ConfigError("nelder_mead_minimize: bound dimensions do not match start");
  }
  if ((opts.upper.array() <= opts.lower.array()).any()) {
    throw ConfigError("nelder_mead_minimize: empty box");
  }

  NelderMeadResult result;
  auto eval = [&](Eigen::VectorXd& p) {
    p = project_to_box(p, opts.lower, opts.upper);
    ++result.evaluations;
    const double v = f(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Eigen::VectorXd> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  values[0] = eval(simplex[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double width = opts.upper(i) - opts.lower(i);
    double step = opts.initial_step > 0.0 ? opts.initial_step : 0.1 * width;
    // Step inward when the start sits on the upper face.
    if (simplex[0](i) + step > opts.upper(i)) step = -step;
    simplex[i + 1](i) += step;
    values[i + 1] = eval(simplex[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  auto diameter = [&]() {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      d = std::max(d, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
    return d;
  };

  for (result.iterations = 0; result.iterations < opts.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), 0);
    // stable_sort keeps ties deterministic
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> v2;
    for (std::size_t idx : order) {
      s2.push_back(simplex[idx]);
      v2.push_back(values[idx]);
    }
    simplex.swap(s2);
    values.swap(v2);

    if (diameter() <= opts.x_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd& worst = simplex[n];
    Eigen::VectorXd reflected = centroid + (centroid - worst);
    const double fr = eval(reflected);

    if (fr < values[0]) {
      Eigen::VectorXd expanded = centroid + 2.0 * (centroid - worst);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
      continue;
    }
    if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
      continue;
    }
    // Contraction: outside when the reflection improved on the worst point.
    const bool outside = fr < values[n];
    Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (worst - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[n])) {
      simplex[n] = contracted;
      values[n] = fc;
      continue;
    }
    for (Eigen::Index i = 1; i <= n; ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

}  // namespace raqr
