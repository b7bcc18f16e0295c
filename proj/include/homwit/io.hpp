#pragma once

#include "homwit/estimation.hpp"
#include "homwit/interference.hpp"
#include "homwit/statemodel.hpp"

#include <json.hpp>

#include <span>
#include <string>

namespace homwit::io {

/// Fixed shortest-roundtrip formatting so emitted artifacts are byte-stable.
std::string format_double(double x);

/// Pattern rendering used in all artifacts: 1-based modes joined by '-',
/// e.g. "1-1-3".
std::string pattern_label(const std::array<int, 3>& modes);

/// CSV columns: pattern, probability, pair_tag, bunched_flag.
std::string distribution_csv(const interference::OutputDistribution& dist);

/// Same content as JSON, with a metadata object alongside the rows.
std::string distribution_json(const interference::OutputDistribution& dist,
                              const nlohmann::ordered_json& metadata);

/// CSV columns: pattern, count.
std::string counts_csv(const estimation::EventCounts& counts,
                       std::span<const interference::PatternInfo> patterns);

/// JSON report of an estimated triple: point estimates, sigmas, bootstrap
/// settings and the seeds used.
std::string estimate_json(const estimation::EstimatedTriple& est,
                          const nlohmann::ordered_json& metadata);

/// Surface grid as CSV: top-left cell names the axes ("beta\gamma" or
/// "dx1\dx2"), first row holds column coordinates, first column row
/// coordinates. Failed cells render as "nan".
std::string surface_csv(const statemodel::SurfaceGrid& grid, const std::string& row_axis,
                        const std::string& col_axis);

/// Metadata sidecar for a surface CSV.
std::string surface_sidecar_json(const nlohmann::ordered_json& metadata);

/// Writes content to path, creating parent directories. Throws on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace homwit::io
