#ifndef PREVINT_ESTIMATORS_HPP
#define PREVINT_ESTIMATORS_HPP

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prevint/classifier.hpp"

namespace prevint {

/// The prevalence estimation methods of the study.
enum class Method {
  acc50,          // adjusted classify & count at threshold 1/2
  acc_p,          // adjusted classify & count at the training prevalence
  acc_v,          // ACC with variance-minimising threshold
  median_sweep,   // median of well-conditioned ACC estimates
  apcc,           // adjusted probabilistic classify & count
  apcc_v,         // APCC with variance-minimising prior parameter
  hellinger4,     // Hellinger distance match on 4 bins
  hellinger8,     // Hellinger distance match on 8 bins
  energy,         // energy distance match (closed form)
  max_likelihood  // ML / Kullback-Leibler minimisation
};

const std::array<Method, 10>& all_methods();

/// Canonical short tag ("ACC50", ..., "ML") used in configs and reports.
std::string_view method_tag(Method method);

/// Parses a tag; accepts "MLboot" and "MLinf" as aliases of "ML".
std::optional<Method> parse_method_tag(std::string_view tag);

/// A point estimate of the positive-class prevalence.
struct PrevalenceEstimate {
  /// Final estimate in [0, 1]; NaN when failed.
  double value = 0.0;
  /// Estimate before clipping (can fall outside [0, 1]).
  double raw_value = 0.0;
  bool clipped = false;
  bool failed = false;
  Method method = Method::acc50;
};

/// Bin layout and class-conditional bin probabilities for the Hellinger match.
struct HellingerBinModel {
  std::vector<double> boundaries;  // ascending inner boundaries, size bins-1
  std::vector<double> pos_probs;   // P[bin | Y=+1], size bins
  std::vector<double> neg_probs;   // P[bin | Y=-1], size bins
};

/// Inner bin boundaries sigma * Phi^{-1}(i/bins) + (mu+nu)/2, i = 1..bins-1.
std::vector<double> hellinger_bin_boundaries(double mu, double nu, double sigma, int bins);

/// Bin model under the training context: exact normal probabilities in
/// population mode; plug-in boundaries and floored empirical class
/// frequencies in finite mode.
HellingerBinModel make_hellinger_bin_model(const TrainingContext& ctx, int bins);

/// Squared-Hellinger objective between the observed bin frequencies and the
/// q-mixture of the class bin probabilities.
double hellinger_objective(const HellingerBinModel& model, const std::vector<double>& test_freqs,
                           double q);

/// Minimiser of hellinger_objective over q in [0, 1]: 101-point coarse grid,
/// then golden-section refinement to 1e-6.
double hellinger_prevalence_from_histogram(const HellingerBinModel& model,
                                           const std::vector<double>& test_freqs);

/// Closed-form energy-distance prevalence from values of a fixed unit-interval
/// classifier on the test sample and the two training classes, using
/// empirical double means for all pairwise expectations.
PrevalenceEstimate energy_prevalence_from_unit_values(std::span<const double> test_values,
                                                      std::span<const double> positive_values,
                                                      std::span<const double> negative_values);

/// Maximum-likelihood prevalence from density ratios: the unique root of the
/// score equation in [0, 1], with boundary clipping when the mean ratio (or
/// mean inverse ratio) does not exceed one.
PrevalenceEstimate estimate_ml_from_ratios(std::span<const double> ratios);

/// Estimate of the asymptotic variance of the ML estimator (the reciprocal of
/// the averaged squared score); nullopt when the estimate failed or the
/// ratios carry no information.
std::optional<double> ml_asymptotic_variance(const PrevalenceEstimate& estimate,
                                             std::span<const double> ratios);

/// Runs the estimation methods of one (training context, posterior model)
/// pair against arbitrary test feature sets. Population functionals, training
/// functionals and per-feature energy terms are computed once and memoised,
/// which keeps repeated calls on bootstrap resamples of the same test sample
/// cheap. Not thread-safe; use one engine per worker. The referenced context
/// must outlive the engine.
class MethodEngine {
 public:
  MethodEngine(const TrainingContext& ctx, const PosteriorModel& model);

  const TrainingContext& context() const { return *ctx_; }
  const PosteriorModel& model() const { return model_; }

  ClassifierRates rates(double threshold) const;
  PosteriorMeans means(std::optional<double> pi) const;

  PrevalenceEstimate adjusted_count(std::span<const double> test, double threshold) const;
  std::optional<double> min_variance_threshold(std::span<const double> test) const;
  PrevalenceEstimate median_sweep(std::span<const double> test) const;
  PrevalenceEstimate probabilistic_count(std::span<const double> test,
                                         std::optional<double> pi) const;
  std::optional<double> min_variance_prior(std::span<const double> test) const;
  PrevalenceEstimate hellinger(std::span<const double> test, int bins) const;
  PrevalenceEstimate energy(std::span<const double> test) const;
  PrevalenceEstimate max_likelihood(std::span<const double> test) const;

  /// Density ratios R(x) for the test features: the population ratio in
  /// infinite mode, the fitted-odds ratio otherwise.
  std::vector<double> density_ratios(std::span<const double> test) const;

  /// Dispatch by method, including the selection step of the tuned variants.
  PrevalenceEstimate estimate(Method method, std::span<const double> test) const;

 private:
  struct EnergyTrainingTerms {
    double pos_pos = 0.0;
    double neg_neg = 0.0;
    double pos_neg = 0.0;
  };
  struct EnergyPointTerm {
    double vs_neg = 0.0;
    double vs_pos = 0.0;
  };

  double posterior_mean_over(std::span<const double> test, double intercept) const;
  const HellingerBinModel& hellinger_model(int bins) const;
  const EnergyTrainingTerms& energy_training_terms() const;
  void ensure_energy_point_terms(std::span<const double> test) const;
  const std::vector<double>& training_posteriors(bool positive_class) const;

  const TrainingContext* ctx_;
  PosteriorModel model_;

  mutable std::map<double, ClassifierRates> rates_cache_;
  mutable std::map<double, PosteriorMeans> means_cache_;
  mutable std::map<int, HellingerBinModel> hellinger_cache_;
  mutable std::optional<EnergyTrainingTerms> energy_terms_;
  mutable std::unordered_map<double, EnergyPointTerm> energy_points_;
  mutable std::optional<std::vector<double>> train_h_pos_;
  mutable std::optional<std::vector<double>> train_h_neg_;
};

// Convenience one-shot forms of the engine calls.
PrevalenceEstimate estimate_acc(const TrainingContext& ctx, const PosteriorModel& model,
                                std::span<const double> test, double threshold);
std::optional<double> select_threshold_accv(const TrainingContext& ctx,
                                            const PosteriorModel& model,
                                            std::span<const double> test);
PrevalenceEstimate estimate_ms(const TrainingContext& ctx, const PosteriorModel& model,
                               std::span<const double> test);
PrevalenceEstimate estimate_apcc(const TrainingContext& ctx, const PosteriorModel& model,
                                 std::span<const double> test,
                                 std::optional<double> pi = std::nullopt);
std::optional<double> select_pi_apccv(const TrainingContext& ctx, const PosteriorModel& model,
                                      std::span<const double> test);
PrevalenceEstimate estimate_hellinger(const TrainingContext& ctx, std::span<const double> test,
                                      int bins);
PrevalenceEstimate estimate_energy(const TrainingContext& ctx, const PosteriorModel& model,
                                   std::span<const double> test);
PrevalenceEstimate estimate_ml(const TrainingContext& ctx, const PosteriorModel& model,
                               std::span<const double> test);

}  // namespace prevint

#endif  // PREVINT_ESTIMATORS_HPP
