#pragma once

// Report emission: canonical JSON (sorted keys, rationals as "p/q" strings,
// outcomes as literal strings) and aligned human-readable tables.

#include <string>
#include <vector>

#include "json.hpp"

#include "ilab/inference_check.hpp"
#include "ilab/montecarlo_oracle.hpp"
#include "ilab/rubin_audit.hpp"

namespace ilab {

using Json = nlohmann::json;

Json to_json(const ClassificationReport& r);
Json to_json(const McReport& r);
Json to_json(const RubinAudit& a);

ClassificationReport classification_from_json(const Json& j);
McReport mc_report_from_json(const Json& j);

/// Deterministic text: two-space indentation, keys sorted, trailing newline.
std::string emit_json(const Json& j);

/// Columns padded to their widest cell; the header is underlined.
std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

std::string human_report(const ClassificationReport& r);
std::string human_report(const McReport& r);
std::string human_report(const RubinAudit& a);

}  // namespace ilab
