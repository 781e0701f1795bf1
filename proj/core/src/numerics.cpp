#include "prevint/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <queue>
#include <vector>

namespace prevint {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

void check_sd(double sd) {
  if (!(sd > 0.0)) throw std::domain_error("normal distribution requires sd > 0");
}

}  // namespace

double normal_pdf(double x, double mean, double sd) {
  check_sd(sd);
  const double z = (x - mean) / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

double normal_cdf(double x, double mean, double sd) {
  check_sd(sd);
  const double z = (x - mean) / sd;
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

double normal_quantile(double p, double mean, double sd) {
  check_sd(sd);
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile requires p in (0, 1)");

  // Work on the lower tail; mirror afterwards.
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;

  // Abramowitz & Stegun 26.2.23 start value (|error| < 4.5e-4), then Halley
  // steps on normal_cdf(z) - pp. erfc keeps the tail residual fully accurate.
  const double t = std::sqrt(-2.0 * std::log(pp));
  double z = -(t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t));

  for (int iter = 0; iter < 6; ++iter) {
    const double err = normal_cdf(z) - pp;
    const double d = kInvSqrt2Pi * std::exp(-0.5 * z * z);
    if (err == 0.0 || d == 0.0) break;
    double step = err / d;
    const double halley = 1.0 + 0.5 * z * step;
    if (halley > 0.5) step /= halley;
    z -= step;
    if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(z)) && iter >= 1) break;
  }

  return mean + sd * (flip ? -z : z);
}

double beta_quantile(double p, double shape1, double shape2) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("beta_quantile requires p in (0, 1)");
  if (!(shape1 > 0.0) || !(shape2 > 0.0))
    throw std::domain_error("beta_quantile requires positive shape parameters");
  return boost::math::ibeta_inv(shape1, shape2, p);
}

namespace {

struct Panel {
  double lo, hi;
  double value;
  double error;
  std::uint64_t seq;
};

struct WorstFirst {
  bool operator()(const Panel& a, const Panel& b) const {
    if (a.error != b.error) return a.error < b.error;
    return a.seq > b.seq;  // older panel wins ties, keeps splitting deterministic
  }
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi,
                     std::uint64_t seq) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double error = 0.0;
  double l1 = 0.0;
  const double value = GK::integrate(f, lo, hi, 0, 0.0, &error, &l1);
  return Panel{lo, hi, value, error, seq};
}

}  // namespace

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  if (!(spec.lower_bound < spec.upper_bound))
    throw std::invalid_argument("integrate: lower_bound must be below upper_bound");
  if (!(spec.abs_tolerance > 0.0)) throw std::invalid_argument("integrate: abs_tolerance must be positive");
  if (spec.max_subdivisions < 1) throw std::invalid_argument("integrate: max_subdivisions must be >= 1");

  std::uint64_t seq = 0;
  std::priority_queue<Panel, std::vector<Panel>, WorstFirst> panels;
  Panel whole = evaluate_panel(f, spec.lower_bound, spec.upper_bound, seq++);
  double total = whole.value;
  double total_error = whole.error;
  panels.push(whole);

  int splits = 0;
  while (total_error > spec.abs_tolerance) {
    if (splits >= spec.max_subdivisions)
      throw QuadratureError("integrate: subdivision budget exhausted", total, total_error);
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi))
      throw QuadratureError("integrate: interval too small to split further", total, total_error);
    const Panel left = evaluate_panel(f, worst.lo, mid, seq++);
    const Panel right = evaluate_panel(f, mid, worst.hi, seq++);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++splits;
  }
  return total;
}

}  // namespace prevint
