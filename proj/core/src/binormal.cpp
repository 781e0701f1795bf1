#include "prevint/binormal.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "prevint/numerics.hpp"

namespace prevint {

void validate(const BinormalParams& params) {
  if (!(params.mu < params.nu))
    throw std::invalid_argument("binormal model requires mu < nu");
  if (!(params.sigma > 0.0))
    throw std::invalid_argument("binormal model requires sigma > 0");
}

UnlabeledSample::UnlabeledSample(std::vector<double> features, int latent_positive_count)
    : features_(std::move(features)), latent_positive_count_(latent_positive_count) {
  if (latent_positive_count_ < 0 ||
      static_cast<std::size_t>(latent_positive_count_) > features_.size())
    throw std::invalid_argument("latent positive count out of range");
}

TrainingContext TrainingContext::from_sample(LabeledSample sample) {
  if (sample.positives.empty() || sample.negatives.empty())
    throw std::invalid_argument("finite training context requires both classes non-empty");
  TrainingContext ctx;
  ctx.infinite_ = false;
  ctx.prevalence_ = sample.designed_prevalence();
  ctx.sample_ = std::move(sample);
  return ctx;
}

TrainingContext TrainingContext::from_population(BinormalParams params, double prevalence) {
  validate(params);
  if (!(prevalence > 0.0 && prevalence < 1.0))
    throw std::invalid_argument("population training context requires prevalence in (0, 1)");
  TrainingContext ctx;
  ctx.infinite_ = true;
  ctx.params_ = params;
  ctx.prevalence_ = prevalence;
  return ctx;
}

const LabeledSample& TrainingContext::sample() const {
  if (infinite_) throw std::logic_error("infinite training context has no sample");
  return sample_;
}

const BinormalParams& TrainingContext::population() const {
  if (!infinite_) throw std::logic_error("finite training context has no population parameters");
  return params_;
}

LabeledSample sample_training(const BinormalParams& params, int m_plus, int m_minus,
                              RngStream& rng) {
  validate(params);
  if (m_plus < 1 || m_minus < 1)
    throw std::invalid_argument("sample_training requires at least one instance per class");
  LabeledSample sample;
  sample.positives.reserve(m_plus);
  sample.negatives.reserve(m_minus);
  for (int i = 0; i < m_plus; ++i) sample.positives.push_back(rng.next_normal(params.nu, params.sigma));
  for (int i = 0; i < m_minus; ++i) sample.negatives.push_back(rng.next_normal(params.mu, params.sigma));
  return sample;
}

UnlabeledSample sample_test(const BinormalParams& params, double q, int n, RngStream& rng) {
  validate(params);
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("sample_test requires q in [0, 1]");
  if (n < 1) throw std::invalid_argument("sample_test requires n >= 1");

  const int positives = rng.next_binomial(n, q);
  std::vector<double> features;
  features.reserve(n);
  for (int i = 0; i < positives; ++i) features.push_back(rng.next_normal(params.nu, params.sigma));
  for (int i = positives; i < n; ++i) features.push_back(rng.next_normal(params.mu, params.sigma));

  // Fisher-Yates shuffle: the class origin must not be recoverable from order.
  for (std::size_t i = features.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(features[i - 1], features[j]);
  }
  return UnlabeledSample(std::move(features), positives);
}

double density_ratio(const BinormalParams& params, double x) {
  const double s2 = params.sigma * params.sigma;
  return std::exp(x * (params.nu - params.mu) / s2 +
                  (params.mu * params.mu - params.nu * params.nu) / (2.0 * s2));
}

double auc(const BinormalParams& params) {
  return normal_cdf((params.nu - params.mu) / (params.sigma * std::sqrt(2.0)));
}

std::vector<RocPoint> roc_curve(const BinormalParams& params, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("roc_curve requires grid_size >= 2");
  const double lo = std::min(params.mu, params.nu) - 8.0 * params.sigma;
  const double hi = std::max(params.mu, params.nu) + 8.0 * params.sigma;
  std::vector<RocPoint> curve;
  curve.reserve(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    curve.push_back(RocPoint{1.0 - normal_cdf(u, params.mu, params.sigma),
                             1.0 - normal_cdf(u, params.nu, params.sigma)});
  }
  return curve;
}

double roc_trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i - 1].fpr - curve[i].fpr) * 0.5 * (curve[i - 1].tpr + curve[i].tpr);
  }
  return area;
}

}  // namespace prevint
