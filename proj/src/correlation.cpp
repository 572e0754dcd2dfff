#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "raqr/coverage_analytics.hpp"
#include "raqr/errors.hpp"

namespace raqr {

CorrelationSpectrum correlation_spectrum(int array_size, double rho) {
  if (array_size < 1) throw ConfigError("array size must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("correlation must lie in [0, 1)");
  CorrelationSpectrum s;
  s.correlation = rho;
  const int m = array_size;

  if (rho == 0.0 || m == 1) {
    s.eigenvalues.assign(m, 1.0);
    s.interference_factor = 1.0;
    s.degenerate = m > 1;
    if (m == 1) s.weights = {1.0};
    return s;
  }

  Eigen::MatrixXd R(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) R(i, j) = std::pow(rho, std::abs(i - j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<>());

  for (int k = 0; k + 1 < m; ++k)
    if (s.eigenvalues[k] - s.eigenvalues[k + 1] < 1e-9)
      throw SingularSystemError("correlation eigenvalues collide; partial fractions undefined");

  double sq = 0.0;
  for (double l : s.eigenvalues) sq += l * l;
  s.interference_factor = sq / m;

  s.weights.resize(m);
  long double total = 0.0L;
  for (int k = 0; k < m; ++k) {
    long double w = 1.0L;
    const long double lk = s.eigenvalues[k];
    for (int j = 0; j < m; ++j)
      if (j != k) w *= lk / (lk - static_cast<long double>(s.eigenvalues[j]));
    s.weights[k] = static_cast<double>(w);
    total += w;
  }
  s.identity_error = static_cast<double>(std::abs(total - 1.0L));
  s.weights_reliable = s.identity_error <= 1e-6;
  return s;
}

double spectrum_ccdf(const CorrelationSpectrum& s, double x) {
  if (x <= 0.0) return 1.0;
  if (s.degenerate) {
    // Sum of Mr unit exponentials: Erlang tail.
    const int m = static_cast<int>(s.eigenvalues.size());
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < m; ++k) {
      term *= x / k;
      sum += term;
    }
    return std::exp(-x) * sum;
  }
  long double p = 0.0L;
  for (std::size_t k = 0; k < s.weights.size(); ++k)
    p += static_cast<long double>(s.weights[k]) * std::exp(-x / s.eigenvalues[k]);
  return static_cast<double>(p);
}

}  // namespace raqr
