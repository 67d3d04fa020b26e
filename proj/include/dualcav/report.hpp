#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualcav/budget.hpp"
#include "dualcav/spectrum.hpp"

namespace dualcav::cli {

/// Writes via a temp file plus rename so readers never see partial output.
void atomic_write_file(const std::string& path, const std::string& content);

/// CSV schemas are stable: column order and names are part of the interface.
std::string budget_csv(const SensitivityCurve& curve);
std::string campaign_csv(const std::vector<SpectrumTrace>& traces);
std::string trace_csv(const SpectrumTrace& trace);

/// Reads a `freq_hz,asd_m_per_sqrt_hz` trace. Throws ConfigError on
/// malformed or empty input.
SpectrumTrace read_trace_csv_text(const std::string& text, const std::string& origin);
SpectrumTrace read_trace_csv_file(const std::string& path);

struct PlotSeries {
    std::string name;
    std::string color;
    const std::vector<double>* x = nullptr;
    const std::vector<double>* y = nullptr;
};

/// Minimal static log-y line plot. Returns the SVG document.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string config_digest;
    uint64_t seed = 0;
    bool seeded = false;
    double duration_ms = 0.0;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
};

std::string manifest_json(const RunManifest& manifest);

}  // namespace dualcav::cli
