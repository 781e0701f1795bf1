#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prevint/simulation.hpp"

using namespace prevint;

namespace {

bool rows_equal(const SummaryRow& a, const SummaryRow& b) {
  const auto same = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return a.tag == b.tag && same(a.av_estimate, b.av_estimate) &&
         same(a.av_abs_dev, b.av_abs_dev) && same(a.perc_fail, b.perc_fail) &&
         same(a.av_int_length, b.av_int_length) && same(a.coverage, b.coverage) &&
         same(a.perc_boundary, b.perc_boundary);
}

bool tables_equal(const std::optional<SummaryTable>& a, const std::optional<SummaryTable>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->size() != b->size()) return false;
  for (std::size_t i = 0; i < a->size(); ++i) {
    if (!rows_equal((*a)[i], (*b)[i])) return false;
  }
  return true;
}

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.name = "small";
  cfg.params = BinormalParams{0.0, 2.5, 1.0};
  cfg.m_plus = 20;
  cfg.m_minus = 40;
  cfg.p = 20.0 / 60.0;
  cfg.q = 0.2;
  cfg.n = 25;
  cfg.n_sim = 6;
  cfg.bootstrap_replicates = 99;
  cfg.interval_kind = IntervalSelection::both;
  cfg.eab = true;
  cfg.methods = {Method::acc50, Method::median_sweep, Method::apcc, Method::hellinger4,
                 Method::energy, Method::max_likelihood};
  return cfg;
}

}  // namespace

TEST_CASE("summarize: single-record arithmetic") {
  RunOutcome outcome;
  outcome.point = 0.2;
  outcome.interval = Interval{0.1, 0.3};
  outcome.target = 0.2;
  const SummaryRow row = summarize({outcome}, 0.2, "X");
  CHECK(row.av_estimate == doctest::Approx(20.0));
  CHECK(row.av_abs_dev == doctest::Approx(0.0));
  CHECK(row.perc_fail == doctest::Approx(0.0));
  CHECK(row.av_int_length == doctest::Approx(20.0));
  CHECK(row.coverage == doctest::Approx(100.0));
  CHECK(row.perc_boundary == doctest::Approx(0.0));
}

TEST_CASE("summarize: deviations, failures and boundary counting") {
  RunOutcome a;
  a.point = 0.1;
  a.target = 0.2;
  RunOutcome b;
  b.point = 0.3;
  b.target = 0.2;
  const SummaryRow row = summarize({a, b}, 0.2, "X");
  CHECK(row.av_abs_dev == doctest::Approx(10.0));
  CHECK(std::isnan(row.av_int_length));  // no intervals produced

  RunOutcome tiny;
  tiny.point = 5e-8;
  tiny.target = 0.2;
  RunOutcome failed;
  failed.failed = true;
  const SummaryRow boundary = summarize({tiny, failed}, 0.2, "X");
  CHECK(boundary.perc_boundary == doctest::Approx(100.0));  // base excludes the failed run
  CHECK(boundary.perc_fail == doctest::Approx(50.0));
}

TEST_CASE("identical config and seed give bit-identical tables") {
  const ScenarioConfig cfg = small_config();
  const ScenarioResult a = run_scenario(cfg, 1);
  const ScenarioResult b = run_scenario(cfg, 1);
  CHECK(tables_equal(a.confidence, b.confidence));
  CHECK(tables_equal(a.prediction, b.prediction));
  CHECK(tables_equal(a.eab, b.eab));
}

TEST_CASE("worker count does not change the tables") {
  const ScenarioConfig cfg = small_config();
  const ScenarioResult serial = run_scenario(cfg, 1);
  const ScenarioResult parallel = run_scenario(cfg, 3);
  CHECK(tables_equal(serial.confidence, parallel.confidence));
  CHECK(tables_equal(serial.prediction, parallel.prediction));
  CHECK(tables_equal(serial.eab, parallel.eab));
}

TEST_CASE("interval kind only switches the target side") {
  ScenarioConfig both = small_config();
  ScenarioConfig conf_only = small_config();
  conf_only.interval_kind = IntervalSelection::confidence;
  conf_only.eab = false;
  const ScenarioResult a = run_scenario(both, 2);
  const ScenarioResult b = run_scenario(conf_only, 2);
  REQUIRE(a.confidence.has_value());
  REQUIRE(b.confidence.has_value());
  CHECK(tables_equal(a.confidence, b.confidence));
  CHECK_FALSE(b.prediction.has_value());
}

TEST_CASE("prediction-only runs skip the confidence table") {
  ScenarioConfig cfg = small_config();
  cfg.interval_kind = IntervalSelection::prediction;
  cfg.eab = false;
  cfg.n_sim = 3;
  const ScenarioResult result = run_scenario(cfg, 1);
  CHECK_FALSE(result.confidence.has_value());
  REQUIRE(result.prediction.has_value());
  CHECK(result.prediction->size() == cfg.methods.size());
}

TEST_CASE("summarize marks an all-failed column") {
  RunOutcome failed;
  failed.failed = true;
  const SummaryRow row = summarize({failed, failed}, 0.2, "X");
  CHECK(row.perc_fail == doctest::Approx(100.0));
  CHECK(std::isnan(row.av_estimate));
  CHECK(std::isnan(row.coverage));
}

TEST_CASE("boundary prevalence scenario runs clean") {
  ScenarioConfig cfg = small_config();
  cfg.name = "zero_q";
  cfg.q = 0.0;
  cfg.eab = false;
  cfg.interval_kind = IntervalSelection::confidence;
  cfg.n_sim = 4;
  const ScenarioResult result = run_scenario(cfg, 2);
  REQUIRE(result.confidence.has_value());
  for (const SummaryRow& row : *result.confidence) {
    if (std::isnan(row.av_estimate)) continue;  // all runs failed for this method
    CHECK(row.av_estimate >= 0.0);
    CHECK(row.av_abs_dev == doctest::Approx(row.av_estimate).epsilon(1e-12));
  }
}

TEST_CASE("config validation rejects bad field combinations") {
  ScenarioConfig cfg = small_config();
  cfg.m_minus.reset();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.interval_engine = IntervalEngine::exact;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // exact + both

  cfg = small_config();
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  ScenarioConfig infinite;
  infinite.name = "inf";
  infinite.params = BinormalParams{0.0, 2.5, 1.0};
  infinite.p = 0.5;
  infinite.q = 0.2;
  infinite.n = 50;
  infinite.n_sim = 2;
  infinite.bootstrap_replicates = 49;
  infinite.interval_engine = IntervalEngine::exact;
  CHECK_NOTHROW(infinite.validate());
}

TEST_CASE("confidence sources follow the engine rules") {
  ScenarioConfig inf = small_config();
  inf.m_plus.reset();
  inf.m_minus.reset();
  inf.p = 0.5;
  inf.interval_kind = IntervalSelection::confidence;
  inf.eab = false;
  CHECK(confidence_source(inf, Method::acc50) == ConfidenceSource::exact_ratio);
  CHECK(confidence_source(inf, Method::acc_v) == ConfidenceSource::exact_ratio);
  CHECK(confidence_source(inf, Method::apcc) == ConfidenceSource::bootstrap);
  CHECK(confidence_source(inf, Method::median_sweep) == ConfidenceSource::bootstrap);
  CHECK(confidence_source(inf, Method::max_likelihood) == ConfidenceSource::ml_asymptotic);
  CHECK(display_tag(inf, Method::max_likelihood) == "MLinf");

  ScenarioConfig finite = small_config();
  finite.interval_kind = IntervalSelection::confidence;
  CHECK(confidence_source(finite, Method::acc50) == ConfidenceSource::bootstrap);
  CHECK(confidence_source(finite, Method::max_likelihood) == ConfidenceSource::bootstrap);
  CHECK(display_tag(finite, Method::max_likelihood) == "MLboot");

  ScenarioConfig exact = finite;
  exact.interval_engine = IntervalEngine::exact;
  CHECK(confidence_source(exact, Method::acc50) == ConfidenceSource::exact_ratio);
  CHECK(confidence_source(exact, Method::median_sweep) == ConfidenceSource::exact_ms);
  CHECK(confidence_source(exact, Method::max_likelihood) == ConfidenceSource::ml_asymptotic);
  CHECK(confidence_source(exact, Method::hellinger4) == ConfidenceSource::bootstrap);
  CHECK(display_tag(exact, Method::max_likelihood) == "MLinf");
}
