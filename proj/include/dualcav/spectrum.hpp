#pragma once

#include <string>
#include <vector>

namespace dualcav {

enum class TraceChannel {
    Measured,
    ThermalOnly,
    BackActionOnly,
    SignalOnly,
    IndividualFront,
    IndividualEnd,
};

std::string to_string(TraceChannel channel);

/// One spectrum-analyzer style trace: RBW bin centers plus single-sided
/// amplitude spectral density values.
struct SpectrumTrace {
    std::vector<double> freq_hz;  // bin centers, strictly increasing
    std::vector<double> asd;      // same length as freq_hz, all >= 0
    std::string unit = "m/sqrt(Hz)";
    TraceChannel channel = TraceChannel::Measured;
};

/// Uniformly gridded raw power spectral density estimate (density units,
/// e.g. m^2/Hz) before analyzer binning.
struct RawPsd {
    double freq_start_hz = 0.0;  // center of the first raw point
    double delta_hz = 0.0;       // raw grid spacing
    std::vector<double> psd;
};

/// Boxcar-averages the raw PSD into RBW-wide bins and takes the square root.
/// Averaging the density preserves total power; a trailing group narrower
/// than the RBW is dropped.
SpectrumTrace rbw_binning(const RawPsd& raw, double rbw_hz);

}  // namespace dualcav
