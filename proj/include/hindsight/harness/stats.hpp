#pragma once

#include <span>

namespace hindsight::harness {

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-sided
};

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom. Both samples need at least two observations. When both
/// variances are zero, t is 0 with p = 1 for equal means, and t is
/// +-infinity with p = 0 otherwise.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

/// Half-width of the 95% Student-t confidence interval of the mean; 0 for
/// fewer than two observations.
double ci95_halfwidth(std::span<const double> xs);

}  // namespace hindsight::harness
