#ifndef PREVINT_MANIFEST_HPP
#define PREVINT_MANIFEST_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "prevint/simulation.hpp"

namespace prevint {

/// Parse failure; the message names the offending key and line.
class ManifestError : public std::runtime_error {
 public:
  ManifestError(const std::string& message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// A batch of scenarios plus output options, as described by one config file.
struct RunManifest {
  std::string output_dir = "out";
  bool emit_csv = true;
  bool emit_text = true;
  std::vector<ScenarioConfig> scenarios;
};

bool operator==(const RunManifest& a, const RunManifest& b);

/// Parses the flat key-value scenario format (see README for the grammar).
RunManifest parse_manifest(const std::string& text);
RunManifest parse_manifest_file(const std::string& path);

/// Canonical text form; parse_manifest(serialize_manifest(m)) == m.
std::string serialize_manifest(const RunManifest& manifest);

}  // namespace prevint

#endif  // PREVINT_MANIFEST_HPP
