#ifndef PREVINT_SIMULATION_HPP
#define PREVINT_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prevint/intervals.hpp"

namespace prevint {

enum class IntervalEngine { bootstrap, exact };
enum class IntervalSelection { confidence, prediction, both };

/// Success probability used when drawing the per-run virtual frequency of a
/// prediction row: the run's point estimate, or the true prevalence.
enum class PredictionDraw { estimate, truth };

struct ScenarioConfig {
  std::string name = "scenario";
  BinormalParams params{};
  double p = 0.5;  // training prevalence; meaningful in infinite-training mode
  double q = 0.2;
  std::optional<int> m_plus;   // empty = infinite training sample
  std::optional<int> m_minus;  // empty = infinite training sample
  int n = 50;
  int n_sim = 100;
  int bootstrap_replicates = 999;
  double alpha = 0.9;
  std::uint64_t seed = 17;
  IntervalSelection interval_kind = IntervalSelection::confidence;
  IntervalEngine interval_engine = IntervalEngine::bootstrap;
  std::vector<Method> methods{all_methods().begin(), all_methods().end()};
  bool eab = false;
  PredictionDraw prediction_draw = PredictionDraw::estimate;

  bool infinite_training() const { return !m_plus.has_value(); }
  double train_prevalence() const;
  bool wants_confidence() const { return interval_kind != IntervalSelection::prediction; }
  bool wants_prediction() const { return interval_kind != IntervalSelection::confidence; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// How the confidence interval of a method is constructed under a config:
/// bootstrap percentile, exact binomial ratio interval, the median-sweep
/// composite of exact intervals, or the ML normal approximation.
enum class ConfidenceSource { bootstrap, exact_ratio, exact_ms, ml_asymptotic };

ConfidenceSource confidence_source(const ScenarioConfig& config, Method method);

/// Column label as used in reports: "ML" resolves to "MLboot" or "MLinf"
/// depending on how its interval is built.
std::string display_tag(const ScenarioConfig& config, Method method);

/// One row of a result table; percentages throughout, NaN where undefined.
struct SummaryRow {
  std::string tag;
  double av_estimate = 0.0;    // "Av prev" / "Av freq"
  double av_abs_dev = 0.0;     // "Av abs dev"
  double perc_fail = 0.0;      // "Perc fail est"
  double av_int_length = 0.0;  // "Av int length"
  double coverage = 0.0;       // "Coverage"
  double perc_boundary = 0.0;  // "Perc 0 or 1"
};

using SummaryTable = std::vector<SummaryRow>;

/// One method's outcome in one simulation run, specialised to one interval
/// kind: the point value entering the averages, the interval (when one was
/// produced) and the value it must cover.
struct RunOutcome {
  bool failed = false;
  double point = 0.0;
  std::optional<Interval> interval;
  double target = 0.0;
};

/// Reduces per-run outcomes to the six tabulated statistics. Averages run
/// over non-failed runs; interval statistics run over produced intervals.
SummaryRow summarize(const std::vector<RunOutcome>& outcomes, double true_prevalence,
                     std::string tag);

struct ScenarioResult {
  ScenarioConfig config;
  std::optional<SummaryTable> confidence;
  std::optional<SummaryTable> prediction;
  std::optional<SummaryTable> eab;  // prediction-type rows for the EAB variants
};

/// Runs the full protocol: n_sim independent runs (training sample, test
/// sample, bootstrap battery, intervals), reduced to result tables. Runs are
/// distributed over `threads` workers; results do not depend on the worker
/// count because every random stream is keyed by (seed, run, purpose,
/// replicate).
ScenarioResult run_scenario(const ScenarioConfig& config, int threads = 1);

}  // namespace prevint

#endif  // PREVINT_SIMULATION_HPP
