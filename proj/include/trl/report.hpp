#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trl/sweep.hpp"

namespace trl::report {

inline constexpr const char* kCsvHeader =
    "family,param,in_plane_mm,angular_deg,kappa_Nmm_per_rad,scf,dof,status";

/// One line per row in the fixed column order. Deterministic.
std::string sweep_csv(const sweep::SweepTable& table);

/// Rows plus provenance. Wall-clock data is left out so the document is
/// byte-stable; see timing_json.
nlohmann::json sweep_json(const sweep::SweepTable& table);

/// Per-row solve times and a timestamp, for the sidecar metadata file.
nlohmann::json timing_json(const sweep::SweepTable& table);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line plot: axes, ticks, polyline with markers, labels.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series);

/// The two metric-vs-parameter curves of a sweep.
std::string sweep_svg(const sweep::SweepTable& table, sweep::Metric metric);

/// Writes text to a file, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace trl::report
