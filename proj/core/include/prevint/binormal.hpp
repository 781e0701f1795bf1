#ifndef PREVINT_BINORMAL_HPP
#define PREVINT_BINORMAL_HPP

#include <cstddef>
#include <vector>

#include "prevint/rng.hpp"

namespace prevint {

/// Population model: the two class-conditional feature distributions are
/// N(mu, sigma^2) for the negative class and N(nu, sigma^2) for the positive
/// class, sharing the standard deviation.
struct BinormalParams {
  double mu = 0.0;
  double nu = 2.5;
  double sigma = 1.0;
};

/// Throws std::invalid_argument unless mu < nu and sigma > 0.
void validate(const BinormalParams& params);

/// Labelled training data, split by class. The subsample sizes are fixed by
/// design, not random.
struct LabeledSample {
  std::vector<double> positives;
  std::vector<double> negatives;

  std::size_t size() const { return positives.size() + negatives.size(); }
  double designed_prevalence() const {
    return size() == 0 ? 0.0 : static_cast<double>(positives.size()) / static_cast<double>(size());
  }
};

/// Unlabelled test data. The number of latent positives is kept for coverage
/// evaluation only; estimation code receives just the feature vector.
class UnlabeledSample {
 public:
  UnlabeledSample(std::vector<double> features, int latent_positive_count);

  const std::vector<double>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }

  /// Ground truth for coverage checks. Estimators must never read this.
  int latent_positive_count() const { return latent_positive_count_; }
  double realized_frequency() const {
    return features_.empty() ? 0.0
                             : static_cast<double>(latent_positive_count_) /
                                   static_cast<double>(features_.size());
  }

 private:
  std::vector<double> features_;
  int latent_positive_count_;
};

/// Where the training information comes from: either a finite labelled sample,
/// or the population itself ("infinite training sample") with a known
/// prevalence, in which case everything downstream uses closed forms.
class TrainingContext {
 public:
  static TrainingContext from_sample(LabeledSample sample);
  static TrainingContext from_population(BinormalParams params, double prevalence);

  bool is_infinite() const { return infinite_; }
  const LabeledSample& sample() const;
  const BinormalParams& population() const;

  /// Designed training prevalence: p in population mode, m+/m in sample mode.
  double train_prevalence() const { return prevalence_; }

 private:
  TrainingContext() = default;

  bool infinite_ = false;
  LabeledSample sample_;
  BinormalParams params_{};
  double prevalence_ = 0.0;
};

/// Draws a stratified training sample: m_plus features from N(nu, sigma^2)
/// and m_minus from N(mu, sigma^2).
LabeledSample sample_training(const BinormalParams& params, int m_plus, int m_minus,
                              RngStream& rng);

/// Draws a test sample of size n: the latent positive count is
/// Binomial(n, q), features come from the matching class-conditionals, and
/// the feature order is shuffled so it carries no label information.
UnlabeledSample sample_test(const BinormalParams& params, double q, int n, RngStream& rng);

/// Ratio of the positive to the negative class-conditional density at x.
double density_ratio(const BinormalParams& params, double x);

/// Area under the ROC curve of the raw feature.
double auc(const BinormalParams& params);

struct RocPoint {
  double fpr;
  double tpr;
};

/// ROC curve of the raw feature on a threshold grid spanning the tails, from
/// the accept-everything end (1,1) to the reject-everything end (0,0).
std::vector<RocPoint> roc_curve(const BinormalParams& params, int grid_size);

/// Trapezoid area under a ROC curve as produced by roc_curve.
double roc_trapezoid_area(const std::vector<RocPoint>& curve);

}  // namespace prevint

#endif  // PREVINT_BINORMAL_HPP
