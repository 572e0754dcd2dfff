#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace raqr {

// Box-constrained Nelder-Mead with the classical coefficients
// (reflection 1, expansion 2, contraction 0.5, shrink 0.5). Points are
// projected onto the box before every objective evaluation.
struct NelderMeadOptions {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double initial_step = 0.0;  // 0 selects 10% of the box width per axis
  double x_tolerance = 1e-6;  // simplex diameter at termination
  int max_iterations = 2000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& start,
                                      const NelderMeadOptions& opts);

Eigen::VectorXd project_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper);

}  // namespace raqr
