#pragma once

#include <filesystem>
#include <string>

#include "qbagents/interaction.hpp"

namespace qbagents {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "QBAGENTS_OUTPUT_DIR";

struct OutputPaths {
  std::filesystem::path dir;
  std::filesystem::path trace_csv;
  std::filesystem::path summary_json;
  std::filesystem::path curves_csv;
  std::filesystem::path series_csv;
  std::filesystem::path clouds_csv;
  std::filesystem::path ellipsoids_csv;
};

std::filesystem::path resolve_output_dir(const std::string& configured);
/// <base>/<scenario>_seed<seed>/...
OutputPaths output_paths(const std::filesystem::path& base, const std::string& scenario, std::uint64_t seed);

/// %.17g; NaN becomes an empty field.
std::string format_number(double v);

/// Long format: one row per (step, agent).
///
///   step, agent, action, outcome, mean_*, std_*, cov_trace, semi_major,
///   dist_source, dist_frequency, outcome_frequency, mean_gap, resampled
std::string trace_csv(const Trace& trace);
std::string summary_json(const Trace& trace);

/// Posterior curves (interval agents) and z-marginal histograms (Bloch agents).
std::string curves_csv(const Trace& trace);
/// Distance and spread metrics every summary_interval steps and at the last step.
std::string series_csv(const Trace& trace);
std::string clouds_csv(const Trace& trace);
/// Mean and standard deviation ellipsoid axes at the summary cadence.
std::string ellipsoids_csv(const Trace& trace);

/// Writes trace.csv and summary.json. Throws Error on I/O failure.
void emit_trace(const Trace& trace, const OutputPaths& paths);
void emit_plot_data(const Trace& trace, const OutputPaths& paths);

}  // namespace qbagents
