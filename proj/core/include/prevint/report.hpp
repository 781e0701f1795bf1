#ifndef PREVINT_REPORT_HPP
#define PREVINT_REPORT_HPP

#include <string>
#include <vector>

#include "prevint/manifest.hpp"

namespace prevint {

/// CSV rendering of one result table: a header row of method tags, then one
/// row per tabulated statistic. decimals < 0 renders full precision.
std::string format_table_csv(const SummaryTable& table, bool prediction_rows, int decimals = 2);

/// Aligned text rendering of every table in the result, in the row order
/// Av prev/freq, Av abs dev, Perc fail est, Av int length, Coverage,
/// Perc 0 or 1.
std::string format_result_text(const ScenarioResult& result);

/// Writes the scenario's tables below output_dir: <name>.txt plus, per table,
/// <name>_<kind>.csv (2 decimals) and <name>_<kind>.raw.csv (full precision).
/// Returns the written paths.
std::vector<std::string> write_scenario_outputs(const ScenarioResult& result,
                                                const std::string& output_dir, bool emit_csv,
                                                bool emit_text);

/// Two-column fpr,tpr CSV of the model's ROC curve.
void write_roc_csv(const BinormalParams& params, int grid_size, const std::string& path);

}  // namespace prevint

#endif  // PREVINT_REPORT_HPP
