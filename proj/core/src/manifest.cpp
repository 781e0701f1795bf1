#include "prevint/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace prevint {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(trim(current));
  return parts;
}

double parse_double(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ManifestError("key '" + key + "': not a number: '" + value + "'", line);
  }
}

long long parse_int(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ManifestError("key '" + key + "': not an integer: '" + value + "'", line);
  }
}

bool parse_bool(const std::string& value, const std::string& key, int line) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ManifestError("key '" + key + "': expected true/false, got '" + value + "'", line);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Raw scenario keys before the m/p bookkeeping is resolved.
struct PendingScenario {
  ScenarioConfig config;
  int header_line = 0;
  std::optional<long long> m_total;
  bool m_total_infinite = false;
  std::optional<long long> m_plus, m_minus;
  bool m_infinite = false;
  bool p_given = false;
  bool q_given = false, n_given = false, nu_given = false;
};

void finalize_scenario(PendingScenario& pending, std::vector<ScenarioConfig>& out) {
  ScenarioConfig& cfg = pending.config;
  const int line = pending.header_line;
  if (!pending.nu_given) throw ManifestError("scenario '" + cfg.name + "': missing key 'nu'", line);
  if (!pending.q_given) throw ManifestError("scenario '" + cfg.name + "': missing key 'q'", line);
  if (!pending.n_given) throw ManifestError("scenario '" + cfg.name + "': missing key 'n'", line);

  if (pending.m_plus.has_value() != pending.m_minus.has_value())
    throw ManifestError("scenario '" + cfg.name + "': m_plus and m_minus must be set together",
                        line);

  if (pending.m_infinite || pending.m_total_infinite) {
    cfg.m_plus.reset();
    cfg.m_minus.reset();
  } else if (pending.m_plus) {
    cfg.m_plus = static_cast<int>(*pending.m_plus);
    cfg.m_minus = static_cast<int>(*pending.m_minus);
  } else if (pending.m_total) {
    if (!pending.p_given)
      throw ManifestError("scenario '" + cfg.name + "': 'm' needs 'p' to split the classes", line);
    const long long m = *pending.m_total;
    const int m_plus = static_cast<int>(std::llround(cfg.p * static_cast<double>(m)));
    cfg.m_plus = m_plus;
    cfg.m_minus = static_cast<int>(m) - m_plus;
  }
  // No m keys at all: infinite training sample (the default).

  if (!cfg.infinite_training()) {
    const double designed = cfg.train_prevalence();
    if (pending.p_given && std::fabs(cfg.p - designed) > 1e-9)
      throw ManifestError("scenario '" + cfg.name + "': p contradicts m_plus/m_minus", line);
    cfg.p = designed;
  } else if (!pending.p_given) {
    throw ManifestError("scenario '" + cfg.name + "': missing key 'p'", line);
  }

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ManifestError("scenario '" + cfg.name + "': " + e.what(), line);
  }
  for (const ScenarioConfig& existing : out) {
    if (existing.name == cfg.name)
      throw ManifestError("duplicate scenario name '" + cfg.name + "'", line);
  }
  out.push_back(cfg);
}

}  // namespace

bool operator==(const RunManifest& a, const RunManifest& b) {
  return a.output_dir == b.output_dir && a.emit_csv == b.emit_csv && a.emit_text == b.emit_text &&
         a.scenarios == b.scenarios;
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest manifest;
  std::optional<PendingScenario> pending;

  std::istringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ManifestError("unterminated section header", line_number);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ManifestError("empty scenario name", line_number);
      if (pending) finalize_scenario(*pending, manifest.scenarios);
      pending.emplace();
      pending->config.name = name;
      pending->header_line = line_number;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ManifestError("expected 'key = value'", line_number);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ManifestError("empty key", line_number);
    if (value.empty()) throw ManifestError("key '" + key + "': empty value", line_number);

    if (!pending) {
      if (key == "output") {
        manifest.output_dir = value;
      } else if (key == "formats") {
        manifest.emit_csv = false;
        manifest.emit_text = false;
        for (const std::string& f : split(value, ',')) {
          if (f == "csv")
            manifest.emit_csv = true;
          else if (f == "text")
            manifest.emit_text = true;
          else
            throw ManifestError("key 'formats': unknown format '" + f + "'", line_number);
        }
      } else {
        throw ManifestError("unknown manifest key '" + key + "'", line_number);
      }
      continue;
    }

    ScenarioConfig& cfg = pending->config;
    if (key == "mu") {
      cfg.params.mu = parse_double(value, key, line_number);
    } else if (key == "nu") {
      cfg.params.nu = parse_double(value, key, line_number);
      pending->nu_given = true;
    } else if (key == "sigma") {
      cfg.params.sigma = parse_double(value, key, line_number);
    } else if (key == "p") {
      cfg.p = parse_double(value, key, line_number);
      pending->p_given = true;
    } else if (key == "q") {
      cfg.q = parse_double(value, key, line_number);
      pending->q_given = true;
    } else if (key == "m") {
      if (value == "inf")
        pending->m_total_infinite = true;
      else
        pending->m_total = parse_int(value, key, line_number);
    } else if (key == "m_plus") {
      if (value == "inf")
        pending->m_infinite = true;
      else
        pending->m_plus = parse_int(value, key, line_number);
    } else if (key == "m_minus") {
      if (value == "inf")
        pending->m_infinite = true;
      else
        pending->m_minus = parse_int(value, key, line_number);
    } else if (key == "n") {
      cfg.n = static_cast<int>(parse_int(value, key, line_number));
      pending->n_given = true;
    } else if (key == "runs") {
      cfg.n_sim = static_cast<int>(parse_int(value, key, line_number));
    } else if (key == "bootstrap") {
      cfg.bootstrap_replicates = static_cast<int>(parse_int(value, key, line_number));
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value, key, line_number);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key, line_number));
    } else if (key == "interval_kind") {
      if (value == "confidence")
        cfg.interval_kind = IntervalSelection::confidence;
      else if (value == "prediction")
        cfg.interval_kind = IntervalSelection::prediction;
      else if (value == "both")
        cfg.interval_kind = IntervalSelection::both;
      else
        throw ManifestError("key 'interval_kind': unknown value '" + value + "'", line_number);
    } else if (key == "interval_engine") {
      if (value == "bootstrap")
        cfg.interval_engine = IntervalEngine::bootstrap;
      else if (value == "exact")
        cfg.interval_engine = IntervalEngine::exact;
      else
        throw ManifestError("key 'interval_engine': unknown value '" + value + "'", line_number);
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& tag : split(value, ',')) {
        const std::optional<Method> m = parse_method_tag(tag);
        if (!m) throw ManifestError("key 'methods': unknown method '" + tag + "'", line_number);
        if (std::find(cfg.methods.begin(), cfg.methods.end(), *m) == cfg.methods.end())
          cfg.methods.push_back(*m);
      }
    } else if (key == "eab") {
      cfg.eab = parse_bool(value, key, line_number);
    } else if (key == "prediction_draw") {
      if (value == "estimate")
        cfg.prediction_draw = PredictionDraw::estimate;
      else if (value == "truth")
        cfg.prediction_draw = PredictionDraw::truth;
      else
        throw ManifestError("key 'prediction_draw': unknown value '" + value + "'", line_number);
    } else {
      throw ManifestError("unknown scenario key '" + key + "'", line_number);
    }
  }
  if (pending) finalize_scenario(*pending, manifest.scenarios);
  return manifest;
}

RunManifest parse_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

std::string serialize_manifest(const RunManifest& manifest) {
  std::ostringstream out;
  out << "output = " << manifest.output_dir << "\n";
  out << "formats = ";
  if (manifest.emit_csv && manifest.emit_text)
    out << "csv,text";
  else if (manifest.emit_csv)
    out << "csv";
  else
    out << "text";
  out << "\n";

  for (const ScenarioConfig& cfg : manifest.scenarios) {
    out << "\n[" << cfg.name << "]\n";
    out << "mu = " << format_double(cfg.params.mu) << "\n";
    out << "nu = " << format_double(cfg.params.nu) << "\n";
    out << "sigma = " << format_double(cfg.params.sigma) << "\n";
    out << "p = " << format_double(cfg.p) << "\n";
    out << "q = " << format_double(cfg.q) << "\n";
    if (cfg.infinite_training()) {
      out << "m_plus = inf\n";
      out << "m_minus = inf\n";
    } else {
      out << "m_plus = " << *cfg.m_plus << "\n";
      out << "m_minus = " << *cfg.m_minus << "\n";
    }
    out << "n = " << cfg.n << "\n";
    out << "runs = " << cfg.n_sim << "\n";
    out << "bootstrap = " << cfg.bootstrap_replicates << "\n";
    out << "alpha = " << format_double(cfg.alpha) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "interval_kind = "
        << (cfg.interval_kind == IntervalSelection::confidence
                ? "confidence"
                : cfg.interval_kind == IntervalSelection::prediction ? "prediction" : "both")
        << "\n";
    out << "interval_engine = "
        << (cfg.interval_engine == IntervalEngine::bootstrap ? "bootstrap" : "exact") << "\n";
    out << "methods = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      if (i > 0) out << ",";
      out << method_tag(cfg.methods[i]);
    }
    out << "\n";
    out << "eab = " << (cfg.eab ? "true" : "false") << "\n";
    out << "prediction_draw = "
        << (cfg.prediction_draw == PredictionDraw::estimate ? "estimate" : "truth") << "\n";
  }
  return out.str();
}

}  // namespace prevint
