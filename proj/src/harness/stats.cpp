#include "hindsight/harness/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>

#include "hindsight/core/errors.hpp"
#include "hindsight/core/stats.hpp"

namespace hindsight::harness {

double student_t_two_sided_p(double t, double dof) {
  if (std::isnan(t) || !(dof > 0.0)) throw NumericalError("bad t statistic or degrees of freedom");
  if (std::isinf(t)) return 0.0;
  // P(|T| > t) = I_{dof / (dof + t^2)}(dof / 2, 1 / 2).
  return boost::math::ibeta(dof / 2.0, 0.5, dof / (dof + t * t));
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw EmptyDataset("Welch's test needs two observations per sample");
  const double ma = sample_mean(a), mb = sample_mean(b);
  const double va = sample_variance(a) / static_cast<double>(a.size());
  const double vb = sample_variance(b) / static_cast<double>(b.size());
  const double se2 = va + vb;
  WelchResult r;
  if (se2 == 0.0) {
    if (ma == mb) return r;
    r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.dof = static_cast<double>(a.size() + b.size() - 2);
    r.p = 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  const double den = va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1);
  r.dof = se2 * se2 / den;
  r.p = student_t_two_sided_p(r.t, r.dof);
  return r;
}

double ci95_halfwidth(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const boost::math::students_t dist(n - 1.0);
  return boost::math::quantile(dist, 0.975) * std::sqrt(sample_variance(xs) / n);
}

}  // namespace hindsight::harness
