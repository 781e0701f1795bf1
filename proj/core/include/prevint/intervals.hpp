#ifndef PREVINT_INTERVALS_HPP
#define PREVINT_INTERVALS_HPP

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "prevint/estimators.hpp"
#include "prevint/rng.hpp"

namespace prevint {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double length() const { return upper - lower; }
  bool contains(double target) const { return lower <= target && target <= upper; }
};

enum class IntervalKind { confidence, prediction };

/// One constructed interval together with the value it is supposed to cover:
/// the population prevalence for confidence intervals, the realized positive
/// frequency of the test sample for prediction intervals.
struct IntervalRecord {
  Interval interval;
  IntervalKind kind = IntervalKind::confidence;
  double level = 0.9;
  double target = 0.0;
  bool failed = false;

  bool covers() const { return !failed && interval.contains(target); }
};

/// Percentile interval from bootstrap replicates: the order statistics at
/// ranks ceil((R+1)(1-alpha)/2) and floor((R+1)(1+alpha)/2) of the sorted
/// values (ranks 50 and 950 for R = 999 at level 0.9). Needs at least two
/// replicates.
std::optional<Interval> percentile_interval(std::vector<double> replicates, double alpha);

/// Exact (Clopper-Pearson) two-sided binomial interval for the success
/// probability after observing `successes` out of n trials.
std::pair<double, double> clopper_pearson(int successes, int n, double alpha);

/// Classifier underlying an exact ratio interval: a threshold classifier, the
/// plain posterior, or the posterior re-anchored at prior pi.
struct ClassifierSpec {
  enum class Kind { threshold, posterior, pi_posterior };
  Kind kind = Kind::threshold;
  double param = 0.5;  // threshold t, or prior pi for pi_posterior
};

/// Conservative interval for a ratio estimator: a Clopper-Pearson interval on
/// the test count (an exceedance count for threshold classifiers, a rounded
/// pseudo-count n*mean(h) for the probabilistic ones), with both endpoints
/// pushed through the adjustment map e -> (e - base)/denominator and clipped.
/// Returns nullopt when the denominator vanishes.
std::optional<Interval> exact_interval_ratio(const MethodEngine& engine,
                                             std::span<const double> test,
                                             const ClassifierSpec& spec, double alpha);

/// Exact-interval analogue of the median sweep: the coordinatewise median of
/// the per-threshold exact intervals over the well-conditioned grid
/// thresholds. Returns nullopt when no threshold qualifies.
std::optional<Interval> exact_interval_median_sweep(const MethodEngine& engine,
                                                    std::span<const double> test, double alpha);

/// Normal-approximation interval for the ML estimate from its asymptotic
/// variance estimate, clipped to [0, 1].
std::optional<Interval> mlinf_interval(const PrevalenceEstimate& estimate,
                                       std::optional<double> variance, int n, double alpha);

/// Virtual relative frequencies for prediction intervals: one Binomial(n, e)/n
/// draw per replicate estimate e.
std::vector<double> prediction_overlay(const std::vector<double>& replicates, int n,
                                       RngStream& rng);

/// Replicate estimates of one method across the bootstrap iterations; failed
/// replicates are dropped but counted.
struct MethodReplicates {
  std::vector<double> estimates;
  int dropped = 0;
};

struct BootstrapBattery {
  std::map<Method, MethodReplicates> by_method;
  int replicate_count = 0;
};

/// Stratified bootstrap: per iteration the training subsamples are resampled
/// within class and the model refitted (skipped in population mode), the test
/// sample is resampled, and every requested method re-estimated. `engine` is
/// the run-level engine, used directly when training is the population.
BootstrapBattery run_bootstrap_battery(const TrainingContext& ctx, const MethodEngine& engine,
                                       std::span<const double> test,
                                       const std::vector<Method>& methods, int replicate_count,
                                       const StreamFamily& streams);

/// Percentile interval of a battery column; fails when more than half of the
/// replicates were dropped.
std::optional<Interval> bootstrap_percentile_interval(const MethodReplicates& replicates,
                                                      int replicate_count, double alpha);

/// One-call bootstrap confidence intervals for a set of methods.
std::map<Method, std::optional<Interval>> bootstrap_confidence(
    const TrainingContext& ctx, const MethodEngine& engine, std::span<const double> test,
    const std::vector<Method>& methods, int replicate_count, double alpha,
    const StreamFamily& streams);

/// Where the predictive values of error-adjusted bootstrapping come from:
/// estimated on the training side (the procedure as proposed), or recomputed
/// under a supplied test prevalence (an oracle variant that isolates the
/// procedure's shift assumption).
enum class PredictiveValueSource { training, oracle };

struct PredictiveValues {
  double given_positive = 0.0;  // P[Y=1 | predicted positive]
  double given_negative = 0.0;  // P[Y=1 | predicted negative]
  bool valid = false;
};

PredictiveValues eab_predictive_values(const TrainingContext& ctx, const PosteriorModel& model,
                                       double threshold,
                                       PredictiveValueSource source = PredictiveValueSource::training,
                                       double oracle_q = 0.0);

/// One error-adjusted relabelling pass over a feature set: classify at the
/// threshold, then flip each prediction to a label by a Bernoulli draw with
/// the matching predictive value; returns the positive fraction.
double eab_relabelled_frequency(const PosteriorModel& model, std::span<const double> features,
                                double threshold, const PredictiveValues& values, RngStream& rng);

struct EabOutcome {
  std::vector<double> replicate_freqs;
  std::optional<Interval> interval;
  bool failed = false;
};

/// Error-adjusted bootstrapping prediction interval: per bootstrap resample of
/// the test features, run the relabelling pass and collect the positive
/// fraction; the interval is the percentile interval of those fractions.
/// `variant` separates the random streams of concurrent EAB configurations.
EabOutcome eab_prediction(const TrainingContext& ctx, const PosteriorModel& model,
                          std::span<const double> test, double threshold, double alpha,
                          int replicate_count, const StreamFamily& streams,
                          std::uint64_t variant = 0,
                          PredictiveValueSource source = PredictiveValueSource::training,
                          double oracle_q = 0.0);

}  // namespace prevint

#endif  // PREVINT_INTERVALS_HPP
