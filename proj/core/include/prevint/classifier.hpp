#ifndef PREVINT_CLASSIFIER_HPP
#define PREVINT_CLASSIFIER_HPP

#include <array>
#include <cmath>
#include <optional>

#include "prevint/binormal.hpp"

namespace prevint {

/// Numerically stable 1 / (1 + exp(-t)).
inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Posterior positive-class probability curve 1 / (1 + exp(slope*x + intercept)).
/// A negative slope means the posterior increases with the feature, which is
/// the orientation the binormal model produces.
struct PosteriorModel {
  enum class Source { fitted, exact };

  double slope = 0.0;
  double intercept = 0.0;
  /// Designed prevalence of the training data the model belongs to.
  double train_prevalence = 0.5;
  Source source = Source::exact;
  /// Set when the fit ran into complete separation and the slope was capped.
  bool separated = false;

  double linear(double x) const { return slope * x + intercept; }
  double posterior(double x) const { return sigmoid(-linear(x)); }

  /// Intercept of the same curve re-anchored at prior probability pi instead
  /// of the training prevalence (the prior-odds term of the intercept is
  /// swapped out).
  double intercept_for_prior(double pi) const;
  double posterior_with_prior(double pi, double x) const {
    return sigmoid(-(slope * x + intercept_for_prior(pi)));
  }
};

/// Largest admissible |slope| for a fitted model; reached only under complete
/// separation, where the likelihood has no finite maximiser.
inline constexpr double kSlopeCap = 50.0;

/// Closed-form posterior coefficients of the binormal population at training
/// prevalence p. Throws std::domain_error for p outside (0, 1).
PosteriorModel exact_posterior(const BinormalParams& params, double p);

/// Maximum-likelihood logistic regression of the class label on the feature,
/// fitted by iteratively reweighted least squares. Complete separation is
/// reported through the separated flag with the slope capped, not an error.
PosteriorModel fit_logistic(const LabeledSample& sample);

/// True/false positive rates of the crisp classifier "posterior >= t".
struct ClassifierRates {
  double tpr = 0.0;
  double fpr = 0.0;
  double denominator() const { return tpr - fpr; }
};

/// Class-conditional means of a soft classifier h.
struct PosteriorMeans {
  double mean_positive = 0.0;
  double mean_negative = 0.0;
  double denominator() const { return mean_positive - mean_negative; }
};

/// Feature cut-off c with "posterior >= t" equivalent to the feature falling
/// on one side of c. Throws std::domain_error when the slope is zero.
double threshold_cutoff(const PosteriorModel& model, double t);

/// Rates of the threshold classifier under the training context: closed-form
/// normal tail probabilities in population mode, empirical exceedance
/// frequencies on the training subsamples otherwise.
ClassifierRates rates_for_threshold(const TrainingContext& ctx, const PosteriorModel& model,
                                    double t);

/// Class-conditional means of the posterior curve (or of its pi-shifted
/// variant when pi is given): quadrature against the class densities in
/// population mode, training subsample means otherwise.
PosteriorMeans means_for_posterior(const TrainingContext& ctx, const PosteriorModel& model,
                                   std::optional<double> pi = std::nullopt);

/// The probability grid {0.05, 0.10, ..., 0.95} used by the threshold- and
/// prior-tuned estimators.
const std::array<double, 19>& probability_grid();

}  // namespace prevint

#endif  // PREVINT_CLASSIFIER_HPP
