#include "prevint/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace prevint {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundaryTolerance = 1e-7;

std::size_t canonical_index(Method method) {
  const auto& methods = all_methods();
  return static_cast<std::size_t>(std::find(methods.begin(), methods.end(), method) -
                                  methods.begin());
}

}  // namespace

double ScenarioConfig::train_prevalence() const {
  if (infinite_training()) return p;
  return static_cast<double>(*m_plus) / static_cast<double>(*m_plus + *m_minus);
}

void ScenarioConfig::validate() const {
  prevint::validate(params);
  if (m_plus.has_value() != m_minus.has_value())
    throw std::invalid_argument("m_plus and m_minus must be set together");
  if (infinite_training()) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("p must lie in (0, 1) for an infinite training sample");
  } else {
    if (*m_plus < 1 || *m_minus < 1)
      throw std::invalid_argument("m_plus and m_minus must be at least 1");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (n_sim < 1) throw std::invalid_argument("runs must be at least 1");
  if (bootstrap_replicates < 2) throw std::invalid_argument("bootstrap must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (methods.empty()) throw std::invalid_argument("methods must not be empty");
  if (interval_engine == IntervalEngine::exact && interval_kind != IntervalSelection::confidence)
    throw std::invalid_argument("interval_engine=exact supports interval_kind=confidence only");
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.name == b.name && a.params.mu == b.params.mu && a.params.nu == b.params.nu &&
         a.params.sigma == b.params.sigma && a.p == b.p && a.q == b.q && a.m_plus == b.m_plus &&
         a.m_minus == b.m_minus && a.n == b.n && a.n_sim == b.n_sim &&
         a.bootstrap_replicates == b.bootstrap_replicates && a.alpha == b.alpha &&
         a.seed == b.seed && a.interval_kind == b.interval_kind &&
         a.interval_engine == b.interval_engine && a.methods == b.methods && a.eab == b.eab &&
         a.prediction_draw == b.prediction_draw;
}

ConfidenceSource confidence_source(const ScenarioConfig& config, Method method) {
  const bool infinite = config.infinite_training();
  if (config.interval_engine == IntervalEngine::exact) {
    switch (method) {
      case Method::acc50:
      case Method::acc_p:
      case Method::acc_v:
      case Method::apcc:
      case Method::apcc_v:
        return ConfidenceSource::exact_ratio;
      case Method::median_sweep:
        return ConfidenceSource::exact_ms;
      case Method::max_likelihood:
        return ConfidenceSource::ml_asymptotic;
      default:
        return ConfidenceSource::bootstrap;  // no exact construction exists
    }
  }
  if (infinite) {
    // With the training sample equal to the population, the threshold-method
    // bootstrap intervals are replaced by conservative binomial intervals and
    // the ML interval by its asymptotic form. The probabilistic methods keep
    // bootstrap intervals: their statistic is not a count, and a binomial
    // interval on a rounded pseudo-count overstates its variance.
    switch (method) {
      case Method::acc50:
      case Method::acc_p:
      case Method::acc_v:
        return ConfidenceSource::exact_ratio;
      case Method::max_likelihood:
        return ConfidenceSource::ml_asymptotic;
      default:
        return ConfidenceSource::bootstrap;
    }
  }
  return ConfidenceSource::bootstrap;
}

std::string display_tag(const ScenarioConfig& config, Method method) {
  if (method == Method::max_likelihood) {
    return confidence_source(config, method) == ConfidenceSource::ml_asymptotic ? "MLinf"
                                                                                : "MLboot";
  }
  return std::string(method_tag(method));
}

SummaryRow summarize(const std::vector<RunOutcome>& outcomes, double true_prevalence,
                     std::string tag) {
  SummaryRow row;
  row.tag = std::move(tag);
  const double n_sim = static_cast<double>(outcomes.size());

  double sum_point = 0.0, sum_dev = 0.0;
  int ok = 0, failed = 0, boundary = 0;
  double sum_length = 0.0;
  int produced = 0, covered = 0;
  for (const RunOutcome& outcome : outcomes) {
    if (outcome.failed) {
      ++failed;
      continue;
    }
    ++ok;
    sum_point += outcome.point;
    sum_dev += std::fabs(outcome.point - true_prevalence);
    if (outcome.point <= kBoundaryTolerance || outcome.point >= 1.0 - kBoundaryTolerance)
      ++boundary;
    if (outcome.interval) {
      ++produced;
      sum_length += outcome.interval->length();
      if (outcome.interval->contains(outcome.target)) ++covered;
    }
  }

  row.perc_fail = 100.0 * static_cast<double>(failed) / n_sim;
  if (ok > 0) {
    row.av_estimate = 100.0 * sum_point / ok;
    row.av_abs_dev = 100.0 * sum_dev / ok;
    row.perc_boundary = 100.0 * static_cast<double>(boundary) / ok;
  } else {
    row.av_estimate = row.av_abs_dev = row.perc_boundary = kNan;
  }
  if (produced > 0) {
    row.av_int_length = 100.0 * sum_length / produced;
    row.coverage = 100.0 * static_cast<double>(covered) / produced;
  } else {
    row.av_int_length = row.coverage = kNan;
  }
  return row;
}

namespace {

struct MethodRunRecord {
  PrevalenceEstimate estimate;
  std::optional<Interval> confidence;
  std::optional<Interval> prediction;
  std::optional<double> virtual_freq;
};

struct EabRunRecord {
  bool failed = true;
  double freq = kNan;
  std::optional<Interval> interval;
};

struct RunRecord {
  double realized_freq = 0.0;
  std::vector<MethodRunRecord> methods;
  std::vector<EabRunRecord> eab;
};

RunRecord simulate_run(const ScenarioConfig& cfg, std::uint64_t run_index) {
  const StreamFamily streams{cfg.seed, run_index};

  TrainingContext ctx = [&] {
    if (cfg.infinite_training()) return TrainingContext::from_population(cfg.params, cfg.p);
    RngStream train_rng = streams.stream(StreamPurpose::training_sample);
    return TrainingContext::from_sample(
        sample_training(cfg.params, *cfg.m_plus, *cfg.m_minus, train_rng));
  }();
  const PosteriorModel model = cfg.infinite_training() ? exact_posterior(cfg.params, cfg.p)
                                                       : fit_logistic(ctx.sample());

  RngStream test_rng = streams.stream(StreamPurpose::test_sample);
  const UnlabeledSample test = sample_test(cfg.params, cfg.q, cfg.n, test_rng);
  const std::span<const double> features(test.features());

  const MethodEngine engine(ctx, model);

  RunRecord record;
  record.realized_freq = test.realized_frequency();
  record.methods.resize(cfg.methods.size());

  // The battery covers every method whose confidence interval is
  // bootstrap-based, plus everything when prediction intervals are wanted
  // (their overlay consumes replicate estimates).
  std::vector<Method> battery_methods;
  for (Method m : cfg.methods) {
    if (cfg.wants_prediction() ||
        (cfg.wants_confidence() && confidence_source(cfg, m) == ConfidenceSource::bootstrap)) {
      battery_methods.push_back(m);
    }
  }
  const BootstrapBattery battery = run_bootstrap_battery(
      ctx, engine, features, battery_methods, cfg.bootstrap_replicates, streams);

  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const Method m = cfg.methods[i];
    MethodRunRecord& out = record.methods[i];
    out.estimate = engine.estimate(m, features);

    if (cfg.wants_confidence() && !out.estimate.failed) {
      switch (confidence_source(cfg, m)) {
        case ConfidenceSource::bootstrap:
          out.confidence = bootstrap_percentile_interval(battery.by_method.at(m),
                                                         cfg.bootstrap_replicates, cfg.alpha);
          break;
        case ConfidenceSource::exact_ratio: {
          ClassifierSpec spec;
          if (m == Method::apcc) {
            spec.kind = ClassifierSpec::Kind::posterior;
          } else if (m == Method::apcc_v) {
            const std::optional<double> pi = engine.min_variance_prior(features);
            if (!pi) break;
            spec.kind = ClassifierSpec::Kind::pi_posterior;
            spec.param = *pi;
          } else {
            spec.kind = ClassifierSpec::Kind::threshold;
            if (m == Method::acc50) {
              spec.param = 0.5;
            } else if (m == Method::acc_p) {
              spec.param = ctx.train_prevalence();
            } else {
              const std::optional<double> t = engine.min_variance_threshold(features);
              if (!t) break;
              spec.param = *t;
            }
          }
          out.confidence = exact_interval_ratio(engine, features, spec, cfg.alpha);
          break;
        }
        case ConfidenceSource::exact_ms:
          out.confidence = exact_interval_median_sweep(engine, features, cfg.alpha);
          break;
        case ConfidenceSource::ml_asymptotic: {
          const std::vector<double> ratios = engine.density_ratios(features);
          out.confidence =
              mlinf_interval(out.estimate, ml_asymptotic_variance(out.estimate, ratios), cfg.n,
                             cfg.alpha);
          break;
        }
      }
    }

    if (cfg.wants_prediction() && !out.estimate.failed) {
      const std::uint64_t slot = canonical_index(m);
      RngStream draw_rng = streams.stream(StreamPurpose::virtual_frequency, slot);
      const double success =
          cfg.prediction_draw == PredictionDraw::estimate ? out.estimate.value : cfg.q;
      out.virtual_freq = static_cast<double>(draw_rng.next_binomial(cfg.n, success)) /
                         static_cast<double>(cfg.n);

      RngStream overlay_rng = streams.stream(StreamPurpose::overlay, slot);
      const MethodReplicates& column = battery.by_method.at(m);
      MethodReplicates overlay;
      overlay.estimates = prediction_overlay(column.estimates, cfg.n, overlay_rng);
      overlay.dropped = column.dropped;
      out.prediction =
          bootstrap_percentile_interval(overlay, cfg.bootstrap_replicates, cfg.alpha);
    }
  }

  if (cfg.eab) {
    record.eab.resize(2);
    const double thresholds[2] = {0.5, ctx.train_prevalence()};
    for (std::uint64_t variant = 0; variant < 2; ++variant) {
      EabRunRecord& out = record.eab[variant];
      const double t = thresholds[variant];
      const EabOutcome outcome = eab_prediction(ctx, model, features, t, cfg.alpha,
                                                cfg.bootstrap_replicates, streams, variant);
      if (outcome.failed) continue;
      const PredictiveValues values = eab_predictive_values(ctx, model, t);
      if (!values.valid) continue;
      RngStream point_rng = streams.stream(StreamPurpose::eab_point, variant);
      out.freq = eab_relabelled_frequency(model, features, t, values, point_rng);
      out.interval = outcome.interval;
      out.failed = false;
    }
  }

  return record;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, int threads) {
  config.validate();
  const int worker_count = std::max(1, threads);

  std::vector<RunRecord> records(config.n_sim);
  if (worker_count == 1 || config.n_sim == 1) {
    for (int r = 0; r < config.n_sim; ++r)
      records[r] = simulate_run(config, static_cast<std::uint64_t>(r));
  } else {
    std::atomic<int> next_run{0};
    auto worker = [&] {
      for (;;) {
        const int r = next_run.fetch_add(1);
        if (r >= config.n_sim) return;
        records[r] = simulate_run(config, static_cast<std::uint64_t>(r));
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  ScenarioResult result;
  result.config = config;

  if (config.wants_confidence()) {
    SummaryTable table;
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      std::vector<RunOutcome> outcomes;
      outcomes.reserve(records.size());
      for (const RunRecord& record : records) {
        const MethodRunRecord& mr = record.methods[i];
        RunOutcome outcome;
        outcome.failed = mr.estimate.failed;
        if (!outcome.failed) {
          outcome.point = mr.estimate.value;
          outcome.interval = mr.confidence;
          outcome.target = config.q;
        }
        outcomes.push_back(outcome);
      }
      table.push_back(summarize(outcomes, config.q, display_tag(config, config.methods[i])));
    }
    result.confidence = std::move(table);
  }

  if (config.wants_prediction()) {
    SummaryTable table;
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      std::vector<RunOutcome> outcomes;
      outcomes.reserve(records.size());
      for (const RunRecord& record : records) {
        const MethodRunRecord& mr = record.methods[i];
        RunOutcome outcome;
        outcome.failed = mr.estimate.failed || !mr.virtual_freq.has_value();
        if (!outcome.failed) {
          outcome.point = *mr.virtual_freq;
          outcome.interval = mr.prediction;
          outcome.target = record.realized_freq;
        }
        outcomes.push_back(outcome);
      }
      table.push_back(
          summarize(outcomes, config.q, "pred" + display_tag(config, config.methods[i])));
    }
    result.prediction = std::move(table);
  }

  if (config.eab) {
    SummaryTable table;
    const char* tags[2] = {"DnPACC50", "DnPACCp"};
    for (std::size_t variant = 0; variant < 2; ++variant) {
      std::vector<RunOutcome> outcomes;
      outcomes.reserve(records.size());
      for (const RunRecord& record : records) {
        const EabRunRecord& er = record.eab[variant];
        RunOutcome outcome;
        outcome.failed = er.failed;
        if (!outcome.failed) {
          outcome.point = er.freq;
          outcome.interval = er.interval;
          outcome.target = record.realized_freq;
        }
        outcomes.push_back(outcome);
      }
      table.push_back(summarize(outcomes, config.q, tags[variant]));
    }
    result.eab = std::move(table);
  }

  return result;
}

}  // namespace prevint
