#include "prevint/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prevint/numerics.hpp"

namespace prevint {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

Interval mapped_interval(double lo, double hi, double base, double denom) {
  double a = (lo - base) / denom;
  double b = (hi - base) / denom;
  if (a > b) std::swap(a, b);
  return Interval{clamp01(a), clamp01(b)};
}

std::size_t exceedance_count(const PosteriorModel& model, std::span<const double> test,
                             double cutoff) {
  std::size_t count = 0;
  if (model.slope < 0.0) {
    for (double x : test) count += x >= cutoff ? 1 : 0;
  } else {
    for (double x : test) count += x <= cutoff ? 1 : 0;
  }
  return count;
}

std::vector<double> resample_with_replacement(std::span<const double> values, std::size_t n,
                                              RngStream& rng) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(values[static_cast<std::size_t>(rng.next_below(values.size()))]);
  }
  return out;
}

}  // namespace

std::optional<Interval> percentile_interval(std::vector<double> replicates, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("percentile_interval requires alpha in (0, 1)");
  const std::size_t n = replicates.size();
  if (n < 2) return std::nullopt;
  std::sort(replicates.begin(), replicates.end());
  // The 1e-9 nudge keeps ranks like (999+1)*0.95 = 950 from landing one order
  // statistic short through floating-point round-off.
  const double np1 = static_cast<double>(n + 1);
  auto rank = [&](double prob, bool up) {
    const double raw = np1 * prob;
    double r = up ? std::floor(raw + 1e-9) : std::ceil(raw - 1e-9);
    r = std::max(1.0, std::min(static_cast<double>(n), r));
    return static_cast<std::size_t>(r);
  };
  const std::size_t lo = rank((1.0 - alpha) / 2.0, false);
  const std::size_t hi = rank((1.0 + alpha) / 2.0, true);
  return Interval{replicates[lo - 1], replicates[hi - 1]};
}

std::pair<double, double> clopper_pearson(int successes, int n, double alpha) {
  if (n < 1) throw std::invalid_argument("clopper_pearson requires n >= 1");
  if (successes < 0 || successes > n)
    throw std::invalid_argument("clopper_pearson requires 0 <= successes <= n");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("clopper_pearson requires alpha in (0, 1)");
  const double k = static_cast<double>(successes);
  const double lower =
      successes == 0 ? 0.0 : beta_quantile((1.0 - alpha) / 2.0, k, static_cast<double>(n) - k + 1.0);
  const double upper =
      successes == n ? 1.0 : beta_quantile((1.0 + alpha) / 2.0, k + 1.0, static_cast<double>(n) - k);
  return {lower, upper};
}

std::optional<Interval> exact_interval_ratio(const MethodEngine& engine,
                                             std::span<const double> test,
                                             const ClassifierSpec& spec, double alpha) {
  const PosteriorModel& model = engine.model();
  if (model.slope == 0.0 || test.empty()) return std::nullopt;
  const int n = static_cast<int>(test.size());

  if (spec.kind == ClassifierSpec::Kind::threshold) {
    const ClassifierRates rates = engine.rates(spec.param);
    const double denom = rates.denominator();
    if (denom == 0.0) return std::nullopt;
    const double cutoff = threshold_cutoff(model, spec.param);
    const int k = static_cast<int>(exceedance_count(model, test, cutoff));
    const auto [lo, hi] = clopper_pearson(k, n, alpha);
    return mapped_interval(lo, hi, rates.fpr, denom);
  }

  const std::optional<double> pi = spec.kind == ClassifierSpec::Kind::pi_posterior
                                       ? std::optional<double>(spec.param)
                                       : std::nullopt;
  const PosteriorMeans means = engine.means(pi);
  const double denom = means.denominator();
  if (denom == 0.0) return std::nullopt;
  const double b = pi ? model.intercept_for_prior(*pi) : model.intercept;
  double mean_h = 0.0;
  for (double x : test) mean_h += sigmoid(-(model.slope * x + b));
  mean_h /= static_cast<double>(n);
  const int k = std::clamp(static_cast<int>(std::lround(mean_h * n)), 0, n);
  const auto [lo, hi] = clopper_pearson(k, n, alpha);
  return mapped_interval(lo, hi, means.mean_negative, denom);
}

std::optional<Interval> exact_interval_median_sweep(const MethodEngine& engine,
                                                    std::span<const double> test, double alpha) {
  if (engine.model().slope == 0.0 || test.empty()) return std::nullopt;
  // The sweep is represented by the median of its qualifying thresholds; the
  // exact interval is built for that classifier (endpoint-averaged over the
  // two middle thresholds when the qualifying count is even).
  std::vector<double> qualifying;
  for (double t : probability_grid()) {
    if (engine.rates(t).denominator() > 0.25) qualifying.push_back(t);
  }
  if (qualifying.empty()) return std::nullopt;

  const auto interval_at = [&](double t) {
    ClassifierSpec spec;
    spec.kind = ClassifierSpec::Kind::threshold;
    spec.param = t;
    return exact_interval_ratio(engine, test, spec, alpha);
  };
  const std::size_t n = qualifying.size();
  if (n % 2 == 1) return interval_at(qualifying[n / 2]);
  const auto a = interval_at(qualifying[n / 2 - 1]);
  const auto b = interval_at(qualifying[n / 2]);
  if (!a || !b) return a ? a : b;
  return Interval{0.5 * (a->lower + b->lower), 0.5 * (a->upper + b->upper)};
}

std::optional<Interval> mlinf_interval(const PrevalenceEstimate& estimate,
                                       std::optional<double> variance, int n, double alpha) {
  if (estimate.failed || !variance || !std::isfinite(*variance) || n < 1) return std::nullopt;
  const double z = normal_quantile((1.0 + alpha) / 2.0);
  const double half = z * std::sqrt(*variance / static_cast<double>(n));
  return Interval{clamp01(estimate.value - half), clamp01(estimate.value + half)};
}

std::vector<double> prediction_overlay(const std::vector<double>& replicates, int n,
                                       RngStream& rng) {
  std::vector<double> freqs;
  freqs.reserve(replicates.size());
  for (double estimate : replicates) {
    freqs.push_back(static_cast<double>(rng.next_binomial(n, estimate)) / static_cast<double>(n));
  }
  return freqs;
}

BootstrapBattery run_bootstrap_battery(const TrainingContext& ctx, const MethodEngine& engine,
                                       std::span<const double> test,
                                       const std::vector<Method>& methods, int replicate_count,
                                       const StreamFamily& streams) {
  BootstrapBattery battery;
  battery.replicate_count = replicate_count;
  for (Method m : methods) battery.by_method.emplace(m, MethodReplicates{});
  if (methods.empty() || replicate_count <= 0) return battery;

  for (int k = 1; k <= replicate_count; ++k) {
    RngStream test_rng = streams.stream(StreamPurpose::test_resample, static_cast<std::uint64_t>(k));
    const std::vector<double> test_boot =
        resample_with_replacement(test, test.size(), test_rng);

    auto run_methods = [&](const MethodEngine& eng) {
      for (Method m : methods) {
        const PrevalenceEstimate est = eng.estimate(m, test_boot);
        MethodReplicates& column = battery.by_method[m];
        if (est.failed)
          ++column.dropped;
        else
          column.estimates.push_back(est.value);
      }
    };

    if (ctx.is_infinite()) {
      run_methods(engine);
    } else {
      RngStream train_rng =
          streams.stream(StreamPurpose::train_resample, static_cast<std::uint64_t>(k));
      LabeledSample boot;
      boot.positives =
          resample_with_replacement(ctx.sample().positives, ctx.sample().positives.size(), train_rng);
      boot.negatives =
          resample_with_replacement(ctx.sample().negatives, ctx.sample().negatives.size(), train_rng);
      const TrainingContext boot_ctx = TrainingContext::from_sample(std::move(boot));
      const PosteriorModel boot_model = fit_logistic(boot_ctx.sample());
      const MethodEngine boot_engine(boot_ctx, boot_model);
      run_methods(boot_engine);
    }
  }
  return battery;
}

std::optional<Interval> bootstrap_percentile_interval(const MethodReplicates& replicates,
                                                      int replicate_count, double alpha) {
  if (replicate_count <= 0) return std::nullopt;
  if (2 * replicates.dropped > replicate_count) return std::nullopt;
  return percentile_interval(replicates.estimates, alpha);
}

std::map<Method, std::optional<Interval>> bootstrap_confidence(
    const TrainingContext& ctx, const MethodEngine& engine, std::span<const double> test,
    const std::vector<Method>& methods, int replicate_count, double alpha,
    const StreamFamily& streams) {
  const BootstrapBattery battery =
      run_bootstrap_battery(ctx, engine, test, methods, replicate_count, streams);
  std::map<Method, std::optional<Interval>> intervals;
  for (Method m : methods) {
    intervals[m] = bootstrap_percentile_interval(battery.by_method.at(m), replicate_count, alpha);
  }
  return intervals;
}

PredictiveValues eab_predictive_values(const TrainingContext& ctx, const PosteriorModel& model,
                                       double threshold, PredictiveValueSource source,
                                       double oracle_q) {
  PredictiveValues values;
  if (model.slope == 0.0) return values;

  if (source == PredictiveValueSource::training && !ctx.is_infinite()) {
    const double cutoff = threshold_cutoff(model, threshold);
    const auto counts = [&](const std::vector<double>& xs) {
      std::size_t predicted_positive = 0;
      if (model.slope < 0.0) {
        for (double x : xs) predicted_positive += x >= cutoff ? 1 : 0;
      } else {
        for (double x : xs) predicted_positive += x <= cutoff ? 1 : 0;
      }
      return predicted_positive;
    };
    const double pos_hits = static_cast<double>(counts(ctx.sample().positives));
    const double neg_hits = static_cast<double>(counts(ctx.sample().negatives));
    const double pos_total = static_cast<double>(ctx.sample().positives.size());
    const double neg_total = static_cast<double>(ctx.sample().negatives.size());
    const double predicted_pos = pos_hits + neg_hits;
    const double predicted_neg = (pos_total - pos_hits) + (neg_total - neg_hits);
    if (predicted_pos == 0.0 || predicted_neg == 0.0) return values;
    values.given_positive = pos_hits / predicted_pos;
    values.given_negative = (pos_total - pos_hits) / predicted_neg;
    values.valid = true;
    return values;
  }

  // Population formulas for the predictive values, at the training prevalence
  // or at a supplied test prevalence (oracle variant).
  const ClassifierRates rates = rates_for_threshold(ctx, model, threshold);
  const double p = source == PredictiveValueSource::oracle ? oracle_q : ctx.train_prevalence();
  const double denom_pos = p * rates.tpr + (1.0 - p) * rates.fpr;
  const double denom_neg = p * (1.0 - rates.tpr) + (1.0 - p) * (1.0 - rates.fpr);
  if (denom_pos <= 0.0 || denom_neg <= 0.0) return values;
  values.given_positive = p * rates.tpr / denom_pos;
  values.given_negative = p * (1.0 - rates.tpr) / denom_neg;
  values.valid = true;
  return values;
}

double eab_relabelled_frequency(const PosteriorModel& model, std::span<const double> features,
                                double threshold, const PredictiveValues& values, RngStream& rng) {
  const double cutoff = threshold_cutoff(model, threshold);
  std::size_t positives = 0;
  for (double x : features) {
    const bool predicted_positive = model.slope < 0.0 ? x >= cutoff : x <= cutoff;
    const double p = predicted_positive ? values.given_positive : values.given_negative;
    positives += rng.next_bernoulli(p) ? 1 : 0;
  }
  return static_cast<double>(positives) / static_cast<double>(features.size());
}

EabOutcome eab_prediction(const TrainingContext& ctx, const PosteriorModel& model,
                          std::span<const double> test, double threshold, double alpha,
                          int replicate_count, const StreamFamily& streams, std::uint64_t variant,
                          PredictiveValueSource source, double oracle_q) {
  EabOutcome outcome;
  if (test.empty() || model.slope == 0.0) {
    outcome.failed = true;
    return outcome;
  }
  const PredictiveValues values = eab_predictive_values(ctx, model, threshold, source, oracle_q);
  if (!values.valid) {
    outcome.failed = true;
    return outcome;
  }

  outcome.replicate_freqs.reserve(replicate_count);
  for (int k = 1; k <= replicate_count; ++k) {
    const std::uint64_t rep = (variant << 40) + static_cast<std::uint64_t>(k);
    RngStream resample_rng = streams.stream(StreamPurpose::eab_resample, rep);
    RngStream flip_rng = streams.stream(StreamPurpose::eab_flips, rep);
    const std::vector<double> boot = resample_with_replacement(test, test.size(), resample_rng);
    outcome.replicate_freqs.push_back(
        eab_relabelled_frequency(model, boot, threshold, values, flip_rng));
  }
  outcome.interval = percentile_interval(outcome.replicate_freqs, alpha);
  outcome.failed = !outcome.interval.has_value();
  return outcome;
}

}  // namespace prevint
