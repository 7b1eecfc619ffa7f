#ifndef HEATLAB_REPORT_HPP
#define HEATLAB_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "heatlab/verify.hpp"

namespace heatlab {

/// Sorted keys, no whitespace, numbers as %.17g (integers verbatim).
/// Non-finite numbers become null.
std::string canonical_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// 16 hex digits of FNV-1a over the canonical JSON of the resolved config.
std::string config_digest(const VerifierConfig& cfg);

struct RunManifest {
  std::string subcommand;
  std::string graph_source;
  std::string config_digest;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  std::map<std::string, double> statistics;
};

nlohmann::json to_json(const RunManifest& m);

/// The verify document: {graph, config, conditions, exponents, skipped, coherence}.
nlohmann::json verify_document(const std::string& graph_source, const VerifierConfig& cfg,
                               const VerifyOutcome& outcome);

/// One row per sample: condition,x,R,n,value,skipped,note,aux.
std::string report_csv(const std::vector<ConditionReport>& reports);
std::vector<CellResult> read_report_csv(const std::string& text);

/// Summary table plus the coherence matrix, built only from fields of `doc`.
std::string report_markdown(const nlohmann::json& doc);

/// Reports stored in a verify document; throws EmptyInput when there are none.
std::vector<ConditionReport> reports_from_document(const nlohmann::json& doc);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace heatlab

#endif  // HEATLAB_REPORT_HPP
