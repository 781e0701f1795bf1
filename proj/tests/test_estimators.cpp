#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "prevint/estimators.hpp"
#include "prevint/numerics.hpp"

using namespace prevint;

namespace {

// Finite context with hand-picked empirical rates: with slope -1, intercept 0
// the t=0.5 cutoff sits at 0, so TPR = 4/5 and FPR = 1/5.
struct CraftedSetup {
  LabeledSample sample;
  TrainingContext ctx;
  PosteriorModel model;

  CraftedSetup()
      : sample{{1.0, 1.0, 1.0, 1.0, -1.0}, {-1.0, -1.0, -1.0, -1.0, 1.0}},
        ctx(TrainingContext::from_sample(sample)) {
    model.slope = -1.0;
    model.intercept = 0.0;
    model.train_prevalence = 0.5;
  }
};

std::vector<double> test_with_exceedance(int exceeding, int n) {
  std::vector<double> features;
  for (int i = 0; i < exceeding; ++i) features.push_back(1.0);
  for (int i = exceeding; i < n; ++i) features.push_back(-1.0);
  return features;
}

}  // namespace

TEST_CASE("method tags round-trip") {
  for (Method m : all_methods()) {
    CHECK(parse_method_tag(method_tag(m)) == m);
  }
  CHECK(parse_method_tag("MLboot") == Method::max_likelihood);
  CHECK(parse_method_tag("MLinf") == Method::max_likelihood);
  CHECK_FALSE(parse_method_tag("nope").has_value());
}

TEST_CASE("adjusted count estimator") {
  CraftedSetup setup;
  const MethodEngine engine(setup.ctx, setup.model);

  const ClassifierRates rates = engine.rates(0.5);
  CHECK(rates.tpr == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rates.fpr == doctest::Approx(0.2).epsilon(1e-12));

  // Exceedance equal to FPR, TPR and midway.
  CHECK(engine.adjusted_count(test_with_exceedance(2, 10), 0.5).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(engine.adjusted_count(test_with_exceedance(8, 10), 0.5).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(engine.adjusted_count(test_with_exceedance(5, 10), 0.5).value ==
        doctest::Approx(0.5).epsilon(1e-12));

  // Clipping on both sides.
  const PrevalenceEstimate low = engine.adjusted_count(test_with_exceedance(0, 10), 0.5);
  CHECK(low.clipped);
  CHECK(low.value == 0.0);
  CHECK(low.raw_value == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  const PrevalenceEstimate high = engine.adjusted_count(test_with_exceedance(10, 10), 0.5);
  CHECK(high.clipped);
  CHECK(high.value == 1.0);

  // Zero denominator fails.
  LabeledSample flat;
  flat.positives = {-3.0};
  flat.negatives = {-3.0};
  const TrainingContext flat_ctx = TrainingContext::from_sample(flat);
  const MethodEngine flat_engine(flat_ctx, setup.model);
  CHECK(flat_engine.adjusted_count(test_with_exceedance(5, 10), 0.5).failed);
}

TEST_CASE("variance-minimising threshold selection") {
  // Only t = 0.5 has a non-zero denominator for this training geometry.
  LabeledSample sample;
  sample.positives = {0.1};
  sample.negatives = {-0.1};
  const TrainingContext ctx = TrainingContext::from_sample(sample);
  PosteriorModel model;
  model.slope = -1.0;
  model.intercept = 0.0;
  const MethodEngine engine(ctx, model);

  const std::vector<double> test = {0.05, -0.3, 0.4};
  const std::optional<double> t = engine.min_variance_threshold(test);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.5).epsilon(1e-12));

  // Selected threshold always comes from the grid.
  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext pop = TrainingContext::from_population(params, 0.5);
  const MethodEngine pop_engine(pop, exact_posterior(params, 0.5));
  const std::vector<double> cloud = testing::mixture_quantile_cloud(params, 0.5, 2001);
  const std::optional<double> chosen = pop_engine.min_variance_threshold(cloud);
  REQUIRE(chosen.has_value());
  bool in_grid = false;
  for (double g : probability_grid()) in_grid = in_grid || g == *chosen;
  CHECK(in_grid);

  // Symmetric high-power population at q = 1/2: the grid oracle picks 0.5.
  double best_obj = 1e300, best_t = -1.0;
  for (double t_grid : probability_grid()) {
    const ClassifierRates r = pop_engine.rates(t_grid);
    const double denom = r.denominator();
    if (denom == 0.0) continue;
    const double cutoff = threshold_cutoff(pop_engine.model(), t_grid);
    double count = 0.0;
    for (double x : cloud) count += x >= cutoff ? 1.0 : 0.0;
    const double rate = (count + 0.5) / (static_cast<double>(cloud.size()) + 1.0);
    const double obj = rate * (1.0 - rate) / (denom * denom);
    if (obj < best_obj) {
      best_obj = obj;
      best_t = t_grid;
    }
  }
  CHECK(*chosen == doctest::Approx(best_t));
  CHECK(best_t == doctest::Approx(0.5));
}

TEST_CASE("median sweep") {
  // Singleton qualifying threshold: the sweep equals that ACC estimate.
  LabeledSample sample;
  sample.positives = {0.1};
  sample.negatives = {-0.1};
  const TrainingContext ctx = TrainingContext::from_sample(sample);
  PosteriorModel model;
  model.slope = -1.0;
  model.intercept = 0.0;
  const MethodEngine engine(ctx, model);
  const std::vector<double> test = {0.05, -0.3, 0.4, -0.2};
  const PrevalenceEstimate ms = engine.median_sweep(test);
  const PrevalenceEstimate acc = engine.adjusted_count(test, 0.5);
  REQUIRE_FALSE(ms.failed);
  CHECK(ms.value == doctest::Approx(acc.value).epsilon(1e-12));

  // Against an in-test re-computation over the qualifying grid thresholds.
  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext pop = TrainingContext::from_population(params, 0.5);
  const PosteriorModel pop_model = exact_posterior(params, 0.5);
  const MethodEngine pop_engine(pop, pop_model);
  const std::vector<double> cloud = testing::mixture_quantile_cloud(params, 0.2, 501);
  std::vector<double> oracle_estimates;
  for (double t : probability_grid()) {
    const double cutoff = threshold_cutoff(pop_model, t);
    const double tpr = 1.0 - normal_cdf(cutoff, params.nu, params.sigma);
    const double fpr = 1.0 - normal_cdf(cutoff, params.mu, params.sigma);
    if (!(tpr - fpr > 0.25)) continue;
    double rate = 0.0;
    for (double x : cloud) rate += x >= cutoff ? 1.0 : 0.0;
    rate /= static_cast<double>(cloud.size());
    const double raw = (rate - fpr) / (tpr - fpr);
    oracle_estimates.push_back(std::min(1.0, std::max(0.0, raw)));
  }
  std::sort(oracle_estimates.begin(), oracle_estimates.end());
  const std::size_t k = oracle_estimates.size();
  REQUIRE(k >= 3);
  const double oracle_median = k % 2 == 1
                                   ? oracle_estimates[k / 2]
                                   : 0.5 * (oracle_estimates[k / 2 - 1] + oracle_estimates[k / 2]);
  CHECK(pop_engine.median_sweep(cloud).value == doctest::Approx(oracle_median).epsilon(1e-10));

  // No qualifying threshold: a barely informative population.
  const BinormalParams weak{0.0, 0.1, 1.0};
  const TrainingContext weak_ctx = TrainingContext::from_population(weak, 0.5);
  const MethodEngine weak_engine(weak_ctx, exact_posterior(weak, 0.5));
  CHECK(weak_engine.median_sweep(cloud).failed);
}

TEST_CASE("median sweep fails more often than ACC at low power") {
  const BinormalParams weak{0.0, 0.1, 1.0};
  int ms_failures = 0, acc_failures = 0;
  for (int seed = 0; seed < 100; ++seed) {
    RngStream train_rng(derive_stream_key(5, seed, StreamPurpose::training_sample, 0));
    const LabeledSample sample = sample_training(weak, 33, 67, train_rng);
    const TrainingContext ctx = TrainingContext::from_sample(sample);
    const PosteriorModel model = fit_logistic(sample);
    const MethodEngine engine(ctx, model);
    RngStream test_rng(derive_stream_key(5, seed, StreamPurpose::test_sample, 0));
    const UnlabeledSample test = sample_test(weak, 0.2, 50, test_rng);
    if (engine.median_sweep(test.features()).failed) ++ms_failures;
    if (engine.adjusted_count(test.features(), 0.5).failed) ++acc_failures;
  }
  CHECK(ms_failures > acc_failures);
  CHECK(ms_failures > 0);
}

TEST_CASE("probabilistic count estimator") {
  // Single-point classes pin the class-conditional means of h exactly.
  const double logit_07 = std::log(0.7 / 0.3);
  const double logit_03 = std::log(0.3 / 0.7);
  const double logit_05 = 0.0;
  LabeledSample sample;
  sample.positives = {logit_07};
  sample.negatives = {logit_03};
  const TrainingContext ctx = TrainingContext::from_sample(sample);
  PosteriorModel model;
  model.slope = -1.0;
  model.intercept = 0.0;
  const MethodEngine engine(ctx, model);

  const PosteriorMeans means = engine.means(std::nullopt);
  CHECK(means.mean_positive == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(means.mean_negative == doctest::Approx(0.3).epsilon(1e-12));

  CHECK(engine.probabilistic_count(std::vector<double>{logit_05}, std::nullopt).value ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(engine.probabilistic_count(std::vector<double>{logit_03}, std::nullopt).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(engine.probabilistic_count(std::vector<double>{logit_07}, std::nullopt).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Zero denominator -> failed.
  PosteriorModel flat;
  flat.slope = 0.0;
  const MethodEngine flat_engine(ctx, flat);
  CHECK(flat_engine.probabilistic_count(std::vector<double>{0.0}, std::nullopt).failed);
}

TEST_CASE("variance-minimising prior selection") {
  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext ctx = TrainingContext::from_population(params, 0.5);
  const PosteriorModel model = exact_posterior(params, 0.5);
  const MethodEngine engine(ctx, model);

  // A degenerate test sample has zero variance for every pi; ties break low.
  const std::vector<double> degenerate(20, 1.3);
  const std::optional<double> tied = engine.min_variance_prior(degenerate);
  REQUIRE(tied.has_value());
  CHECK(*tied == doctest::Approx(0.05));

  // Fixed scenario matches an exhaustive in-test grid evaluation.
  RngStream rng(31);
  const UnlabeledSample test = sample_test(params, 0.2, 500, rng);
  const std::optional<double> chosen = engine.min_variance_prior(test.features());
  REQUIRE(chosen.has_value());
  double best_obj = 1e300, best_pi = -1.0;
  for (double pi : probability_grid()) {
    const PosteriorMeans means = engine.means(pi);
    const double denom = means.denominator();
    if (denom == 0.0) continue;
    double sum = 0.0, sum_sq = 0.0;
    for (double x : test.features()) {
      const double h = model.posterior_with_prior(pi, x);
      sum += h;
      sum_sq += h * h;
    }
    const double n = static_cast<double>(test.features().size());
    const double var = sum_sq / n - (sum / n) * (sum / n);
    const double obj = var / (denom * denom);
    if (obj < best_obj) {
      best_obj = obj;
      best_pi = pi;
    }
  }
  CHECK(*chosen == doctest::Approx(best_pi));
  bool in_grid = false;
  for (double g : probability_grid()) in_grid = in_grid || g == *chosen;
  CHECK(in_grid);
}

TEST_CASE("hellinger bin boundaries and zero-distance match") {
  const std::vector<double> bounds = hellinger_bin_boundaries(0.0, 2.5, 1.0, 4);
  REQUIRE(bounds.size() == 3);
  CHECK(bounds[0] == doctest::Approx(normal_quantile(0.25) + 1.25).epsilon(1e-12));
  CHECK(bounds[1] == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(bounds[2] == doctest::Approx(normal_quantile(0.75) + 1.25).epsilon(1e-12));

  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext ctx = TrainingContext::from_population(params, 0.5);
  for (int bins : {4, 8}) {
    const HellingerBinModel model = make_hellinger_bin_model(ctx, bins);
    std::vector<double> mixture(model.pos_probs.size());
    for (std::size_t i = 0; i < mixture.size(); ++i) {
      mixture[i] = 0.3 * model.pos_probs[i] + 0.7 * model.neg_probs[i];
    }
    CHECK(hellinger_prevalence_from_histogram(model, mixture) ==
          doctest::Approx(0.3).epsilon(1e-6));
  }
}

TEST_CASE("hellinger matches a brute-force grid minimiser") {
  const BinormalParams params{0.0, 1.0, 1.0};
  const TrainingContext pop = TrainingContext::from_population(params, 0.4);
  for (int seed = 0; seed < 5; ++seed) {
    RngStream rng(derive_stream_key(77, seed, StreamPurpose::test_sample, 0));
    const UnlabeledSample test = sample_test(params, 0.35, 200, rng);
    for (int bins : {4, 8}) {
      const PrevalenceEstimate est = estimate_hellinger(pop, test.features(), bins);
      REQUIRE_FALSE(est.failed);
      // Independent objective: recompute bin probabilities and frequencies.
      const std::vector<double> bounds =
          hellinger_bin_boundaries(params.mu, params.nu, params.sigma, bins);
      std::vector<double> fpos(bins), fneg(bins), freq(bins, 0.0);
      for (int i = 0; i < bins; ++i) {
        const double hi_edge = i + 1 < bins ? bounds[i] : 1e9;
        const double lo_edge = i > 0 ? bounds[i - 1] : -1e9;
        fpos[i] = normal_cdf(hi_edge, params.nu, params.sigma) -
                  normal_cdf(lo_edge, params.nu, params.sigma);
        fneg[i] = normal_cdf(hi_edge, params.mu, params.sigma) -
                  normal_cdf(lo_edge, params.mu, params.sigma);
      }
      for (double x : test.features()) {
        int idx = 0;
        while (idx < bins - 1 && x > bounds[idx]) ++idx;
        freq[idx] += 1.0;
      }
      for (double& f : freq) f /= static_cast<double>(test.features().size());
      const auto objective = [&](double q) {
        double total = 0.0;
        for (int i = 0; i < bins; ++i) {
          const double d = std::sqrt(freq[i]) - std::sqrt(q * fpos[i] + (1.0 - q) * fneg[i]);
          total += d * d;
        }
        return total;
      };
      const double oracle = testing::grid_minimise01(objective, 1e-4);
      CHECK(est.value == doctest::Approx(oracle).epsilon(2e-3));
      CHECK(est.value >= 0.0);
      CHECK(est.value <= 1.0);
      CHECK_FALSE(est.clipped);
    }
  }
}

TEST_CASE("energy closed form on hand-computable values") {
  const std::vector<double> test = {0.0, 1.0};
  const std::vector<double> pos = {1.0};
  const std::vector<double> neg = {0.0};
  const PrevalenceEstimate est = energy_prevalence_from_unit_values(test, pos, neg);
  REQUIRE_FALSE(est.failed);
  CHECK(est.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.raw_value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("energy estimator is Fisher consistent at q = 0") {
  const BinormalParams params{0.0, 2.5, 1.0};
  RngStream train_rng(1);
  const LabeledSample sample = sample_training(params, 500, 500, train_rng);
  const TrainingContext ctx = TrainingContext::from_sample(sample);
  const PosteriorModel model = fit_logistic(sample);
  RngStream test_rng(2);
  const UnlabeledSample test = sample_test(params, 0.0, 4000, test_rng);
  const PrevalenceEstimate est = estimate_energy(ctx, model, test.features());
  REQUIRE_FALSE(est.failed);
  CHECK(est.value < 0.05);
}

TEST_CASE("energy matches the grid minimiser of the distance objective") {
  const BinormalParams params{0.0, 2.5, 1.0};
  const PosteriorModel model = exact_posterior(params, 0.5);

  SUBCASE("finite mode, empirical double means") {
    RngStream train_rng(3);
    const LabeledSample sample = sample_training(params, 40, 60, train_rng);
    const TrainingContext ctx = TrainingContext::from_sample(sample);
    RngStream test_rng(4);
    const UnlabeledSample test = sample_test(params, 0.3, 80, test_rng);

    // In-test plain double loops, independent of the library's fast path.
    std::vector<double> ht, hp, hn;
    for (double x : test.features()) ht.push_back(model.posterior(x));
    for (double x : sample.positives) hp.push_back(model.posterior(x));
    for (double x : sample.negatives) hn.push_back(model.posterior(x));
    const auto cross_mean = [](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0.0;
      for (double u : a)
        for (double v : b) s += std::fabs(u - v);
      return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    };
    const double qp = cross_mean(ht, hp);
    const double qn = cross_mean(ht, hn);
    const double pp = cross_mean(hp, hp);
    const double nn = cross_mean(hn, hn);
    const double pn = cross_mean(hp, hn);
    const auto objective = [&](double q) {
      return 2.0 * q * qp + 2.0 * (1.0 - q) * qn - q * q * pp - (1.0 - q) * (1.0 - q) * nn -
             2.0 * q * (1.0 - q) * pn;
    };
    const double oracle = testing::grid_minimise01(objective, 1e-4);
    const PrevalenceEstimate est = estimate_energy(ctx, model, test.features());
    REQUIRE_FALSE(est.failed);
    CHECK(est.value == doctest::Approx(oracle).epsilon(1e-3));
  }

  SUBCASE("population mode, trapezoid-integral oracle") {
    const TrainingContext ctx = TrainingContext::from_population(params, 0.5);
    RngStream test_rng(6);
    const UnlabeledSample test = sample_test(params, 0.3, 60, test_rng);
    const auto h = [&](double x) { return model.posterior(x); };

    const double lo = -9.0, hi = 11.5;
    const int grid = 200001;
    const auto pdf_pos = [&](double x) { return normal_pdf(x, params.nu, params.sigma); };
    const auto pdf_neg = [&](double x) { return normal_pdf(x, params.mu, params.sigma); };
    const auto qp_term = [&](double x) {
      double s = 0.0;
      for (double y : test.features()) s += std::fabs(h(x) - h(y));
      return pdf_pos(x) * s / static_cast<double>(test.features().size());
    };
    const auto qn_term = [&](double x) {
      double s = 0.0;
      for (double y : test.features()) s += std::fabs(h(x) - h(y));
      return pdf_neg(x) * s / static_cast<double>(test.features().size());
    };
    const double qp = testing::trapezoid(qp_term, lo, hi, 20001);
    const double qn = testing::trapezoid(qn_term, lo, hi, 20001);
    const double pp = testing::trapezoid(
        [&](double x) {
          return 4.0 * pdf_pos(x) * normal_cdf(x, params.nu, params.sigma) * h(x) -
                 2.0 * pdf_pos(x) * h(x);
        },
        lo, hi, grid);
    const double nn = testing::trapezoid(
        [&](double x) {
          return 4.0 * pdf_neg(x) * normal_cdf(x, params.mu, params.sigma) * h(x) -
                 2.0 * pdf_neg(x) * h(x);
        },
        lo, hi, grid);
    const double pn = testing::trapezoid(
        [&](double x) {
          return 2.0 * pdf_neg(x) * normal_cdf(x, params.nu, params.sigma) * h(x) -
                 pdf_neg(x) * h(x) + 2.0 * pdf_pos(x) * normal_cdf(x, params.mu, params.sigma) * h(x) -
                 pdf_pos(x) * h(x);
        },
        lo, hi, grid);
    const auto objective = [&](double q) {
      return 2.0 * q * qp + 2.0 * (1.0 - q) * qn - q * q * pp - (1.0 - q) * (1.0 - q) * nn -
             2.0 * q * (1.0 - q) * pn;
    };
    const double oracle = testing::grid_minimise01(objective, 1e-4);
    const PrevalenceEstimate est = estimate_energy(ctx, model, test.features());
    REQUIRE_FALSE(est.failed);
    CHECK(est.value == doctest::Approx(oracle).epsilon(1e-3));
  }
}

TEST_CASE("maximum-likelihood estimator from ratios") {
  // Hand-solvable pair: 1/(q+1) = 0.5/(1-0.5q) has the root q = 0.5.
  const std::vector<double> pair = {2.0, 0.5};
  const PrevalenceEstimate est = estimate_ml_from_ratios(pair);
  REQUIRE_FALSE(est.failed);
  CHECK(est.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(est.clipped);

  // Boundary clipping.
  const std::vector<double> weak = {0.9, 0.95, 1.01};
  const PrevalenceEstimate at_zero = estimate_ml_from_ratios(weak);
  CHECK(at_zero.value == 0.0);
  CHECK(at_zero.clipped);
  CHECK(at_zero.raw_value < 0.0);

  const std::vector<double> strong = {1.5, 2.0, 1.1};
  const PrevalenceEstimate at_one = estimate_ml_from_ratios(strong);
  CHECK(at_one.value == 1.0);
  CHECK(at_one.clipped);
  CHECK(at_one.raw_value > 1.0);

  // No information at all.
  const std::vector<double> flat = {1.0, 1.0, 1.0};
  CHECK(estimate_ml_from_ratios(flat).failed);
}

TEST_CASE("maximum likelihood agrees with a likelihood maximiser") {
  RngStream rng(123);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> ratios;
    for (int i = 0; i < 200; ++i) ratios.push_back(std::exp(rng.next_normal(0.15, 1.0)));
    const PrevalenceEstimate est = estimate_ml_from_ratios(ratios);
    REQUIRE_FALSE(est.failed);
    const auto log_likelihood = [&](double q) {
      double ll = 0.0;
      for (double r : ratios) ll += std::log(std::max(q * (r - 1.0) + 1.0, 1e-300));
      return ll;
    };
    const double oracle = testing::golden_maximise(log_likelihood, 0.0, 1.0, 1e-9);
    if (est.clipped) {
      CHECK(std::fabs(est.value - oracle) < 1e-6);
    } else {
      CHECK(est.value == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("ml asymptotic variance") {
  const std::vector<double> ratios(40, 2.0);
  PrevalenceEstimate est;
  est.value = 0.5;
  est.method = Method::max_likelihood;
  const std::optional<double> v = ml_asymptotic_variance(est, ratios);
  REQUIRE(v.has_value());
  CHECK(*v == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(*v > 0.0);

  // Ratios near one carry almost no information: the variance blows up.
  std::vector<double> faint(40);
  for (int i = 0; i < 40; ++i) faint[i] = 1.0 + (i % 2 == 0 ? 1e-6 : -1e-6);
  const std::optional<double> big = ml_asymptotic_variance(est, faint);
  REQUIRE(big.has_value());
  CHECK(*big > 1e9);

  PrevalenceEstimate failed;
  failed.failed = true;
  CHECK_FALSE(ml_asymptotic_variance(failed, ratios).has_value());
}

TEST_CASE("density ratios: population and fitted routes coincide for the exact model") {
  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext pop = TrainingContext::from_population(params, 0.3);
  const PosteriorModel model = exact_posterior(params, 0.3);
  const MethodEngine pop_engine(pop, model);

  LabeledSample dummy;
  dummy.positives = {2.4, 2.6, 2.5};
  dummy.negatives = {0.0, -0.1, 0.2, 0.3, 0.1, -0.2, -0.3};
  const TrainingContext finite = TrainingContext::from_sample(dummy);  // prevalence 0.3
  const MethodEngine fitted_engine(finite, model);

  const std::vector<double> xs = {-1.0, 0.0, 1.25, 2.0, 3.5};
  const std::vector<double> a = pop_engine.density_ratios(xs);
  const std::vector<double> b = fitted_engine.density_ratios(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }
}

TEST_CASE("every method recovers q from exact mixture functionals") {
  const BinormalParams params{0.0, 2.5, 1.0};
  const TrainingContext ctx = TrainingContext::from_population(params, 0.5);
  const PosteriorModel model = exact_posterior(params, 0.5);
  const MethodEngine engine(ctx, model);
  const double q = 0.3;
  const std::vector<double> cloud = testing::mixture_quantile_cloud(params, q, 20000);
  for (Method m : all_methods()) {
    const PrevalenceEstimate est = engine.estimate(m, cloud);
    REQUIRE_FALSE(est.failed);
    CHECK_MESSAGE(std::fabs(est.value - q) < 1e-3, "method ", method_tag(m), " value ",
                  est.value);
  }
}

TEST_CASE("ratio estimators depend on the classifier set only") {
  // Rescaling the posterior coefficients and re-indexing the threshold so the
  // feature cutoff is unchanged leaves the crisp classifier, and with it the
  // estimate, exactly the same.
  CraftedSetup setup;
  const std::vector<double> test = {0.4, -0.7, 1.3, -0.2, 0.9, -1.4};

  PosteriorModel doubled = setup.model;
  doubled.slope = 2.0 * setup.model.slope;
  doubled.intercept = 2.0 * setup.model.intercept;
  const auto reindex = [&](double t) {
    // log((1-t')/t') = 2 log((1-t)/t)  =>  same cutoff under doubled coefficients
    const double l2 = 2.0 * std::log((1.0 - t) / t);
    return 1.0 / (1.0 + std::exp(l2));
  };
  for (double t : {0.3, 0.5, 0.7}) {
    const PrevalenceEstimate original = estimate_acc(setup.ctx, setup.model, test, t);
    const PrevalenceEstimate rescaled = estimate_acc(setup.ctx, doubled, test, reindex(t));
    REQUIRE_FALSE(original.failed);
    REQUIRE_FALSE(rescaled.failed);
    CHECK(original.value == doctest::Approx(rescaled.value).epsilon(1e-12));
  }
}

TEST_CASE("hellinger and energy estimates stay inside the unit interval unclipped") {
  const BinormalParams params{0.0, 1.0, 1.0};
  for (int seed = 0; seed < 10; ++seed) {
    RngStream train_rng(derive_stream_key(400, seed, StreamPurpose::training_sample, 0));
    const LabeledSample sample = sample_training(params, 20, 30, train_rng);
    const TrainingContext ctx = TrainingContext::from_sample(sample);
    const PosteriorModel model = fit_logistic(sample);
    const MethodEngine engine(ctx, model);
    RngStream test_rng(derive_stream_key(400, seed, StreamPurpose::test_sample, 0));
    const UnlabeledSample test = sample_test(params, 0.1, 30, test_rng);
    for (Method m : {Method::hellinger4, Method::hellinger8, Method::energy}) {
      const PrevalenceEstimate est = engine.estimate(m, test.features());
      if (est.failed) continue;
      CHECK(est.value >= 0.0);
      CHECK(est.value <= 1.0);
      CHECK_FALSE(est.clipped);
    }
  }
}
