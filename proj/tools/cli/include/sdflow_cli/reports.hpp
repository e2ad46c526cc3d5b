#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sdflow/certificates.hpp"
#include "sdflow/curve_flow.hpp"
#include "sdflow/graph_pde.hpp"
#include "sdflow/soliton.hpp"

namespace sdflow::cli {

using nlohmann::json;

json options_json(const IntegratorOptions& o);
json state_json(const ProfileState& s);
json kind_json(const SolitonKind& kind);
json certificate_json(const BreakdownCertificate& c);
json classification_json(const ClassificationReport& r, std::optional<std::uint64_t> seed,
                         const IntegratorOptions& opts, double y_budget);

/// {identity, max_residual, y_at_max, samples, thresholds, pass}
json identity_json(const std::string& identity, double max_residual, double y_at_max,
                   std::size_t samples, const json& thresholds, bool pass);

json graph_monitors_json(const GraphMonitors& m);
json curve_monitors_json(const CurveMonitors& m);

/// Parses the "kind" block written by kind_json. Throws std::invalid_argument.
SolitonKind kind_from_json(const json& j);

/// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace sdflow::cli
