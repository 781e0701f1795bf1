#include "prevint/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace prevint {

namespace {

const char* kRowNames[6] = {"Av prev",       "Av abs dev", "Perc fail est",
                            "Av int length", "Coverage",   "Perc 0 or 1"};

std::string row_name(int row, bool prediction_rows) {
  if (row == 0 && prediction_rows) return "Av freq";
  return kRowNames[row];
}

double row_value(const SummaryRow& r, int row) {
  switch (row) {
    case 0: return r.av_estimate;
    case 1: return r.av_abs_dev;
    case 2: return r.perc_fail;
    case 3: return r.av_int_length;
    case 4: return r.coverage;
    default: return r.perc_boundary;
  }
}

std::string format_value(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  if (decimals < 0)
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  else
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void append_text_table(std::ostringstream& out, const SummaryTable& table, bool prediction_rows,
                       const std::string& heading) {
  out << heading << "\n";
  std::size_t label_width = 0;
  for (int row = 0; row < 6; ++row) label_width = std::max(label_width, row_name(row, prediction_rows).size());
  std::vector<std::size_t> widths(table.size());
  for (std::size_t c = 0; c < table.size(); ++c) {
    widths[c] = table[c].tag.size();
    for (int row = 0; row < 6; ++row)
      widths[c] = std::max(widths[c], format_value(row_value(table[c], row), 2).size());
  }

  out << std::string(label_width, ' ');
  for (std::size_t c = 0; c < table.size(); ++c) {
    const std::string& tag = table[c].tag;
    out << "  " << std::string(widths[c] - tag.size(), ' ') << tag;
  }
  out << "\n";
  for (int row = 0; row < 6; ++row) {
    const std::string label = row_name(row, prediction_rows);
    out << label << std::string(label_width - label.size(), ' ');
    for (std::size_t c = 0; c < table.size(); ++c) {
      const std::string v = format_value(row_value(table[c], row), 2);
      out << "  " << std::string(widths[c] - v.size(), ' ') << v;
    }
    out << "\n";
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string short_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string scenario_heading(const ScenarioConfig& cfg, const char* kind) {
  std::ostringstream out;
  out << "[" << cfg.name << "] " << kind << " (n=" << cfg.n << ", m+=";
  if (cfg.infinite_training())
    out << "inf, m-=inf";
  else
    out << *cfg.m_plus << ", m-=" << *cfg.m_minus;
  out << ", nu=" << short_number(cfg.params.nu) << ", p=" << short_number(cfg.p)
      << ", q=" << short_number(cfg.q) << ", alpha=" << short_number(cfg.alpha)
      << ", seed=" << cfg.seed << ")";
  return out.str();
}

}  // namespace

std::string format_table_csv(const SummaryTable& table, bool prediction_rows, int decimals) {
  std::ostringstream out;
  out << "statistic";
  for (const SummaryRow& r : table) out << "," << csv_field(r.tag);
  out << "\n";
  for (int row = 0; row < 6; ++row) {
    out << csv_field(row_name(row, prediction_rows));
    for (const SummaryRow& r : table) out << "," << format_value(row_value(r, row), decimals);
    out << "\n";
  }
  return out.str();
}

std::string format_result_text(const ScenarioResult& result) {
  std::ostringstream out;
  bool first = true;
  const auto section = [&](const SummaryTable& table, bool prediction_rows, const char* kind) {
    if (!first) out << "\n";
    first = false;
    append_text_table(out, table, prediction_rows, scenario_heading(result.config, kind));
  };
  if (result.confidence) section(*result.confidence, false, "confidence intervals");
  if (result.prediction) section(*result.prediction, true, "prediction intervals");
  if (result.eab) section(*result.eab, true, "error-adjusted bootstrap prediction intervals");
  return out.str();
}

std::vector<std::string> write_scenario_outputs(const ScenarioResult& result,
                                                const std::string& output_dir, bool emit_csv,
                                                bool emit_text) {
  std::filesystem::create_directories(output_dir);
  std::vector<std::string> written;
  const std::string base = output_dir + "/" + result.config.name;

  const auto emit_tables = [&](const SummaryTable& table, bool prediction_rows,
                               const std::string& kind) {
    const std::string path = base + "_" + kind + ".csv";
    write_file(path, format_table_csv(table, prediction_rows, 2));
    written.push_back(path);
    const std::string raw_path = base + "_" + kind + ".raw.csv";
    write_file(raw_path, format_table_csv(table, prediction_rows, -1));
    written.push_back(raw_path);
  };

  if (emit_csv) {
    if (result.confidence) emit_tables(*result.confidence, false, "confidence");
    if (result.prediction) emit_tables(*result.prediction, true, "prediction");
    if (result.eab) emit_tables(*result.eab, true, "eab");
  }
  if (emit_text) {
    const std::string path = base + ".txt";
    write_file(path, format_result_text(result) + "\n");
    written.push_back(path);
  }
  return written;
}

void write_roc_csv(const BinormalParams& params, int grid_size, const std::string& path) {
  const std::vector<RocPoint> curve = roc_curve(params, grid_size);
  std::ostringstream out;
  out << "fpr,tpr\n";
  char buf[80];
  for (const RocPoint& point : curve) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", point.fpr, point.tpr);
    out << buf;
  }
  write_file(path, out.str());
}

}  // namespace prevint
