#include "dualcav/spectrum.hpp"

#include <cmath>
#include <stdexcept>

namespace dualcav {

std::string to_string(TraceChannel channel) {
    switch (channel) {
        case TraceChannel::Measured: return "measured";
        case TraceChannel::ThermalOnly: return "thermal_only";
        case TraceChannel::BackActionOnly: return "back_action_only";
        case TraceChannel::SignalOnly: return "signal_only";
        case TraceChannel::IndividualFront: return "individual_front";
        case TraceChannel::IndividualEnd: return "individual_end";
    }
    return "unknown";
}

SpectrumTrace rbw_binning(const RawPsd& raw, double rbw_hz) {
    if (!(raw.delta_hz > 0.0)) {
        throw std::invalid_argument("rbw_binning: raw grid spacing must be > 0");
    }
    if (!(rbw_hz >= raw.delta_hz)) {
        throw std::invalid_argument("rbw_binning: RBW must be >= the raw grid spacing");
    }
    if (raw.psd.empty()) {
        throw std::invalid_argument("rbw_binning: empty PSD");
    }

    const size_t group = static_cast<size_t>(std::floor(rbw_hz / raw.delta_hz + 0.5));
    const size_t nbins = raw.psd.size() / group;
    if (nbins == 0) {
        throw std::invalid_argument("rbw_binning: fewer raw points than one RBW bin");
    }

    SpectrumTrace trace;
    trace.freq_hz.resize(nbins);
    trace.asd.resize(nbins);
    const double bin_width = static_cast<double>(group) * raw.delta_hz;
    for (size_t b = 0; b < nbins; ++b) {
        double acc = 0.0;
        for (size_t j = 0; j < group; ++j) acc += raw.psd[b * group + j];
        acc /= static_cast<double>(group);
        // First raw center sits delta/2 past the left edge of the span.
        trace.freq_hz[b] = raw.freq_start_hz - 0.5 * raw.delta_hz +
                           (static_cast<double>(b) + 0.5) * bin_width;
        trace.asd[b] = std::sqrt(acc);
    }
    return trace;
}

}  // namespace dualcav
