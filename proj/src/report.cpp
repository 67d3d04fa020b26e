#include "dualcav/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualcav/config.hpp"
#include "dualcav/constants.hpp"

namespace dualcav::cli {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string budget_csv(const SensitivityCurve& curve) {
    std::ostringstream out;
    out << "freq_hz,shot,back_action,thermal_front,thermal_end,total\n";
    for (size_t i = 0; i < curve.freq_rad_s.size(); ++i) {
        out << fmt(curve.freq_rad_s[i] / kTwoPi) << ',' << fmt(curve.shot[i]) << ','
            << fmt(curve.back_action[i]) << ',' << fmt(curve.thermal_front[i]) << ','
            << fmt(curve.thermal_end[i]) << ',' << fmt(curve.total[i]) << '\n';
    }
    return out.str();
}

std::string campaign_csv(const std::vector<SpectrumTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("campaign_csv: no traces");
    std::ostringstream out;
    out << "freq_hz";
    for (const auto& t : traces) out << ',' << to_string(t.channel);
    out << '\n';
    const size_t n = traces.front().freq_hz.size();
    for (const auto& t : traces) {
        if (t.freq_hz.size() != n) {
            throw std::invalid_argument("campaign_csv: traces not on a common grid");
        }
    }
    for (size_t i = 0; i < n; ++i) {
        out << fmt(traces.front().freq_hz[i]);
        for (const auto& t : traces) out << ',' << fmt(t.asd[i]);
        out << '\n';
    }
    return out.str();
}

std::string trace_csv(const SpectrumTrace& trace) {
    std::ostringstream out;
    out << "freq_hz,asd_m_per_sqrt_hz\n";
    for (size_t i = 0; i < trace.freq_hz.size(); ++i) {
        out << fmt(trace.freq_hz[i]) << ',' << fmt(trace.asd[i]) << '\n';
    }
    return out.str();
}

SpectrumTrace read_trace_csv_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) {
        throw ConfigError(origin + ": empty trace CSV");
    }
    ++line_no;
    // Tolerate a UTF-8 BOM and trailing carriage return.
    if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "freq_hz,asd_m_per_sqrt_hz") {
        throw ConfigError(origin + ":1: expected header 'freq_hz,asd_m_per_sqrt_hz'", 1);
    }
    SpectrumTrace trace;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected two columns",
                              line_no);
        }
        try {
            size_t used = 0;
            const double f = std::stod(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing");
            const std::string rest = line.substr(comma + 1);
            const double a = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing");
            trace.freq_hz.push_back(f);
            trace.asd.push_back(a);
        } catch (const std::exception&) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": bad number in '" +
                                  line + "'",
                              line_no);
        }
    }
    if (trace.freq_hz.size() < 2) {
        throw ConfigError(origin + ": trace CSV has fewer than 2 rows");
    }
    for (size_t i = 1; i < trace.freq_hz.size(); ++i) {
        if (!(trace.freq_hz[i] > trace.freq_hz[i - 1])) {
            throw ConfigError(origin + ": freq_hz must be strictly increasing");
        }
    }
    return trace;
}

SpectrumTrace read_trace_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read trace CSV '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_trace_csv_text(buf.str(), path);
}

namespace {

struct PlotFrame {
    double x0, x1, y0, y1;  // data ranges (y in log10)
    static constexpr double kW = 920.0, kH = 560.0;
    static constexpr double kL = 80.0, kR = 20.0, kT = 40.0, kB = 50.0;

    double px(double x) const { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); }
    double py(double ylog) const {
        return kH - kB - (ylog - y0) / (y1 - y0) * (kH - kT - kB);
    }
};

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool have = false;
    for (const auto& s : series) {
        if (!s.x || !s.y) continue;
        for (size_t i = 0; i < s.x->size() && i < s.y->size(); ++i) {
            const double y = (*s.y)[i];
            if (!(y > 0.0) || !std::isfinite(y)) continue;
            const double ylog = std::log10(y);
            const double x = (*s.x)[i];
            if (!have) {
                x_min = x_max = x;
                y_min = y_max = ylog;
                have = true;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, ylog);
                y_max = std::max(y_max, ylog);
            }
        }
    }
    if (!have || x_max <= x_min) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (y_max <= y_min) y_max = y_min + 1.0;
    y_min = std::floor(y_min);
    y_max = std::ceil(y_max);

    PlotFrame frame{x_min, x_max, y_min, y_max};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << PlotFrame::kW
        << "\" height=\"" << PlotFrame::kH << "\" viewBox=\"0 0 " << PlotFrame::kW << ' '
        << PlotFrame::kH << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << PlotFrame::kW / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // Axes box and log-decade gridlines.
    svg << "<rect x=\"" << PlotFrame::kL << "\" y=\"" << PlotFrame::kT << "\" width=\""
        << PlotFrame::kW - PlotFrame::kL - PlotFrame::kR << "\" height=\""
        << PlotFrame::kH - PlotFrame::kT - PlotFrame::kB
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double dec = y_min; dec <= y_max + 1e-9; dec += 1.0) {
        const double y = frame.py(dec);
        svg << "<line x1=\"" << PlotFrame::kL << "\" y1=\"" << y << "\" x2=\""
            << PlotFrame::kW - PlotFrame::kR << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << PlotFrame::kL - 6 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e"
            << static_cast<int>(dec) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double x = x_min + (x_max - x_min) * i / 5.0;
        svg << "<text x=\"" << frame.px(x) << "\" y=\"" << PlotFrame::kH - PlotFrame::kB + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(x) << "</text>\n";
    }
    svg << "<text x=\"" << PlotFrame::kW / 2 << "\" y=\"" << PlotFrame::kH - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << PlotFrame::kH / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << PlotFrame::kH / 2 << ")\">" << y_label
        << "</text>\n";

    double legend_y = PlotFrame::kT + 16.0;
    for (const auto& s : series) {
        if (!s.x || !s.y) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (size_t i = 0; i < s.x->size() && i < s.y->size(); ++i) {
            const double y = (*s.y)[i];
            if (!(y > 0.0) || !std::isfinite(y)) continue;
            svg << frame.px((*s.x)[i]) << ',' << frame.py(std::log10(y)) << ' ';
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << PlotFrame::kW - PlotFrame::kR - 8 << "\" y=\"" << legend_y
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
            << s.color << "\">" << s.name << "</text>\n";
        legend_y += 14.0;
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string manifest_json(const RunManifest& manifest) {
    nlohmann::json j;
    j["tool_version"] = manifest.tool_version;
    j["command"] = manifest.command;
    j["config_digest"] = manifest.config_digest;
    if (manifest.seeded) j["seed"] = manifest.seed;
    j["duration_ms"] = manifest.duration_ms;
    j["outputs"] = manifest.outputs;
    j["warnings"] = manifest.warnings;
    return j.dump(2) + "\n";
}

}  // namespace dualcav::cli
