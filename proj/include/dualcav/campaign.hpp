#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dualcav/budget.hpp"
#include "dualcav/cavity.hpp"
#include "dualcav/mechanics.hpp"
#include "dualcav/spectrum.hpp"

namespace dualcav {

/// Everything needed to synthesize one spectrum-analyzer measurement run.
struct CampaignConfig {
    CavityParams cavity;
    MirrorModel front;
    MirrorModel end;
    BeamSet beams;
    double temperature_k = 300.0;

    double span_lo_hz = 0.0;
    double span_hi_hz = 0.0;
    double rbw_hz = 10.0;
    /// Bandwidth of the noise drive around each analyzer frequency. Kept for
    /// documentation; the drive is ideally white within an RBW bin.
    double drive_bandwidth_hz = 600.0;
    int averages = 100;
    uint64_t seed = 1;
    /// Raw synthesis points per RBW bin.
    int oversample = 8;
    /// Polarization leakage of the noise beam into the probe quadrature,
    /// in dB (power). -inf = perfect isolation.
    double leakage_db = -std::numeric_limits<double>::infinity();
};

struct CampaignResult {
    std::vector<SpectrumTrace> traces;
    std::vector<std::string> warnings;

    struct Meta {
        double force_drive_asd_n = 0.0;  // radiation-pressure drive, N/sqrt(Hz)
        double shot_floor_m = 0.0;       // probe shot-noise floor, m/sqrt(Hz)
        double rbw_hz = 0.0;
        int averages = 0;
        uint64_t seed = 0;
    } meta;

    const SpectrumTrace& trace(TraceChannel channel) const;
};

/// Synthesizes the measured displacement spectrum and its companion channels
/// in the frequency domain: per-mirror thermal noise from independent
/// complex-Gaussian draws with the fluctuation-dissipation magnitude, a
/// single common intensity-noise process driving both mirrors through
/// chi_e + chi_f, the probe shot floor, and an optional monochromatic signal.
/// The individual_front / individual_end channels are the noise-free expected
/// single-mirror radiation-pressure responses, evaluated at bin centers.
///
/// Identical config (seed included) produces bit-identical traces.
CampaignResult run_campaign(const CampaignConfig& config);

/// Returns a copy of the config with a monochromatic force applied to one
/// mirror. Amplitude is the RMS force in newtons.
CampaignConfig inject_force_signal(CampaignConfig config, MirrorSide target,
                                   double amplitude_n, double frequency_rad_s);

}  // namespace dualcav
