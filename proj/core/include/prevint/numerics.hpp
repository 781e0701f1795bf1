#ifndef PREVINT_NUMERICS_HPP
#define PREVINT_NUMERICS_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace prevint {

/// Density of the normal distribution with the given mean and standard deviation.
double normal_pdf(double x, double mean = 0.0, double sd = 1.0);

/// Distribution function of the normal distribution. Computed through erfc so
/// that both tails keep full relative accuracy. Saturates to {0, 1} instead of
/// raising on extreme arguments.
double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

/// Inverse of normal_cdf. Requires 0 < p < 1 and sd > 0, otherwise throws
/// std::domain_error. Accurate enough that normal_cdf(normal_quantile(p))
/// round-trips to well below 1e-12.
double normal_quantile(double p, double mean = 0.0, double sd = 1.0);

/// Quantile of the Beta(shape1, shape2) distribution, i.e. the value q in
/// [0, 1] whose regularized incomplete beta integral equals p. Requires
/// 0 < p < 1 and positive shapes; throws std::domain_error otherwise.
double beta_quantile(double p, double shape1, double shape2);

/// Bounds and budget of one 1-D quadrature request.
struct QuadratureSpec {
  double lower_bound = 0.0;
  double upper_bound = 1.0;
  double abs_tolerance = 1e-10;
  int max_subdivisions = 2000;
};

/// Raised when the subdivision budget runs out before the requested absolute
/// tolerance is met. Carries the best available estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best, double error_estimate)
      : std::runtime_error(what), best_estimate(best), error_estimate(error_estimate) {}

  double best_estimate;
  double error_estimate;
};

/// Globally adaptive Gauss-Kronrod integration of f over the requested
/// interval. Panels with the largest embedded error estimate are bisected
/// first until the total estimated error drops below abs_tolerance.
double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec);

}  // namespace prevint

#endif  // PREVINT_NUMERICS_HPP
