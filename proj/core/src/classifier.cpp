#include "prevint/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prevint/numerics.hpp"

namespace prevint {

double PosteriorModel::intercept_for_prior(double pi) const {
  if (!(pi > 0.0 && pi < 1.0))
    throw std::domain_error("prior probability must lie in (0, 1)");
  const double p = train_prevalence;
  return intercept + std::log((1.0 - pi) / pi) - std::log((1.0 - p) / p);
}

PosteriorModel exact_posterior(const BinormalParams& params, double p) {
  validate(params);
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("exact_posterior requires p in (0, 1)");
  const double s2 = params.sigma * params.sigma;
  PosteriorModel model;
  model.slope = (params.mu - params.nu) / s2;
  model.intercept =
      (params.nu * params.nu - params.mu * params.mu) / (2.0 * s2) + std::log((1.0 - p) / p);
  model.train_prevalence = p;
  model.source = PosteriorModel::Source::exact;
  return model;
}

namespace {

// Caps the slope while keeping the 50% decision boundary in place.
void cap_slope(PosteriorModel& model) {
  const double boundary = -model.intercept / model.slope;
  model.slope = model.slope < 0.0 ? -kSlopeCap : kSlopeCap;
  model.intercept = -boundary * model.slope;
  model.separated = true;
}

}  // namespace

PosteriorModel fit_logistic(const LabeledSample& sample) {
  if (sample.positives.empty() || sample.negatives.empty())
    throw std::invalid_argument("fit_logistic requires both classes non-empty");

  const double phat = sample.designed_prevalence();
  PosteriorModel model;
  model.train_prevalence = phat;
  model.source = PosteriorModel::Source::fitted;

  const auto [neg_min, neg_max] = std::minmax_element(sample.negatives.begin(), sample.negatives.end());
  const auto [pos_min, pos_max] = std::minmax_element(sample.positives.begin(), sample.positives.end());
  if (*neg_max < *pos_min) {
    // Complete separation, positives above: the likelihood has no finite optimum.
    const double boundary = 0.5 * (*neg_max + *pos_min);
    model.slope = -kSlopeCap;
    model.intercept = kSlopeCap * boundary;
    model.separated = true;
    return model;
  }
  if (*pos_max < *neg_min) {
    const double boundary = 0.5 * (*pos_max + *neg_min);
    model.slope = kSlopeCap;
    model.intercept = -kSlopeCap * boundary;
    model.separated = true;
    return model;
  }

  // IRLS on eta = beta0 + beta1 * x with P[Y=1|x] = sigmoid(eta).
  double beta0 = std::log(phat / (1.0 - phat));
  double beta1 = 0.0;
  double previous_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < 25; ++iter) {
    double sw = 0.0, swx = 0.0, swxx = 0.0, g0 = 0.0, g1 = 0.0, ll = 0.0;
    auto accumulate = [&](double x, double y) {
      const double pi = sigmoid(beta0 + beta1 * x);
      const double w = std::max(pi * (1.0 - pi), 1e-10);
      sw += w;
      swx += w * x;
      swxx += w * x * x;
      const double r = y - pi;
      g0 += r;
      g1 += r * x;
      ll += std::log(std::max(y > 0.5 ? pi : 1.0 - pi, 1e-300));
    };
    for (double x : sample.positives) accumulate(x, 1.0);
    for (double x : sample.negatives) accumulate(x, 0.0);

    if (iter > 0 && std::fabs(ll - previous_ll) < 1e-8) break;
    previous_ll = ll;

    const double det = sw * swxx - swx * swx;
    if (!(std::fabs(det) > 1e-12 * (1.0 + sw * swxx))) break;  // feature carries no information
    beta0 += (swxx * g0 - swx * g1) / det;
    beta1 += (sw * g1 - swx * g0) / det;

    if (std::fabs(beta1) > kSlopeCap) break;
  }

  model.slope = -beta1;
  model.intercept = -beta0;
  if (std::fabs(model.slope) > kSlopeCap) cap_slope(model);
  return model;
}

double threshold_cutoff(const PosteriorModel& model, double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("threshold must lie in (0, 1)");
  if (model.slope == 0.0)
    throw std::domain_error("degenerate classifier: posterior slope is zero");
  return (std::log((1.0 - t) / t) - model.intercept) / model.slope;
}

namespace {

double exceedance_fraction(const std::vector<double>& values, double cutoff, bool upper_side) {
  if (values.empty()) return 0.0;
  std::size_t count = 0;
  if (upper_side) {
    for (double v : values) count += v >= cutoff ? 1 : 0;
  } else {
    for (double v : values) count += v <= cutoff ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(values.size());
}

QuadratureSpec population_window(const BinormalParams& params) {
  QuadratureSpec spec;
  spec.lower_bound = std::min(params.mu, params.nu) - 8.0 * params.sigma;
  spec.upper_bound = std::max(params.mu, params.nu) + 8.0 * params.sigma;
  spec.abs_tolerance = 1e-10;
  spec.max_subdivisions = 2000;
  return spec;
}

}  // namespace

ClassifierRates rates_for_threshold(const TrainingContext& ctx, const PosteriorModel& model,
                                    double t) {
  const double c = threshold_cutoff(model, t);
  const bool upper_side = model.slope < 0.0;  // posterior increases with x
  ClassifierRates rates;
  if (ctx.is_infinite()) {
    const BinormalParams& pop = ctx.population();
    const double tail_pos = normal_cdf(c, pop.nu, pop.sigma);
    const double tail_neg = normal_cdf(c, pop.mu, pop.sigma);
    rates.tpr = upper_side ? 1.0 - tail_pos : tail_pos;
    rates.fpr = upper_side ? 1.0 - tail_neg : tail_neg;
  } else {
    rates.tpr = exceedance_fraction(ctx.sample().positives, c, upper_side);
    rates.fpr = exceedance_fraction(ctx.sample().negatives, c, upper_side);
  }
  return rates;
}

PosteriorMeans means_for_posterior(const TrainingContext& ctx, const PosteriorModel& model,
                                   std::optional<double> pi) {
  const double b = pi ? model.intercept_for_prior(*pi) : model.intercept;
  const auto h = [&](double x) { return sigmoid(-(model.slope * x + b)); };

  PosteriorMeans means;
  if (ctx.is_infinite()) {
    const BinormalParams& pop = ctx.population();
    const QuadratureSpec spec = population_window(pop);
    means.mean_positive =
        integrate([&](double x) { return normal_pdf(x, pop.nu, pop.sigma) * h(x); }, spec);
    means.mean_negative =
        integrate([&](double x) { return normal_pdf(x, pop.mu, pop.sigma) * h(x); }, spec);
  } else {
    double sum_pos = 0.0, sum_neg = 0.0;
    for (double x : ctx.sample().positives) sum_pos += h(x);
    for (double x : ctx.sample().negatives) sum_neg += h(x);
    means.mean_positive = sum_pos / static_cast<double>(ctx.sample().positives.size());
    means.mean_negative = sum_neg / static_cast<double>(ctx.sample().negatives.size());
  }
  return means;
}

const std::array<double, 19>& probability_grid() {
  static const std::array<double, 19> grid = [] {
    std::array<double, 19> g{};
    for (int i = 0; i < 19; ++i) g[i] = 0.05 * static_cast<double>(i + 1);
    return g;
  }();
  return grid;
}

}  // namespace prevint
