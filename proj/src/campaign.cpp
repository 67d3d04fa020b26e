#include "dualcav/campaign.hpp"

#include <cmath>
#include <stdexcept>

#include "dualcav/constants.hpp"
#include "dualcav/random.hpp"

namespace dualcav {

namespace {

enum StreamId : uint64_t {
    kStreamBackAction = 0,
    kStreamShot = 1,
    kStreamThermalFront = 2,
    kStreamThermalEnd = 3,
    kStreamLeakage = 4,
};

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

const SpectrumTrace& CampaignResult::trace(TraceChannel channel) const {
    for (const auto& t : traces) {
        if (t.channel == channel) return t;
    }
    throw std::out_of_range("CampaignResult: channel not present");
}

CampaignResult run_campaign(const CampaignConfig& config) {
    config.beams.validate();
    require(config.rbw_hz > 0.0, "campaign: RBW must be > 0");
    require(config.span_hi_hz > config.span_lo_hz && config.span_lo_hz > 0.0,
            "campaign: need 0 < span_lo < span_hi");
    require(config.span_hi_hz - config.span_lo_hz >= 10.0 * config.rbw_hz,
            "campaign: span width must be at least 10x the RBW");
    require(config.averages >= 1, "campaign: averages must be >= 1");
    require(config.oversample >= 1, "campaign: oversample must be >= 1");
    require(config.temperature_k > 0.0, "campaign: temperature must be > 0");
    const double bandwidth_hz = config.cavity.bandwidth_rad_s() / kTwoPi;
    require(config.span_hi_hz < bandwidth_hz,
            "campaign: span exceeds the modeled band (cavity bandwidth)");

    CampaignResult result;
    if (config.span_hi_hz > bandwidth_hz / 3.0) {
        result.warnings.push_back(
            "span extends above bandwidth/3: the quasi-static cavity response is "
            "an approximation there");
    }
    if (config.front.modes.size() >= 1 && config.end.modes.size() >= 1) {
        const double splitting_hz =
            std::abs(config.end.modes.front().resonance_hz() -
                     config.front.modes.front().resonance_hz());
        if (config.rbw_hz > splitting_hz) {
            result.warnings.push_back("RBW is coarser than the doublet splitting");
        }
    }

    const size_t nbins =
        static_cast<size_t>(std::floor((config.span_hi_hz - config.span_lo_hz) / config.rbw_hz));
    require(nbins >= 2, "campaign: span too narrow for the RBW");
    const size_t group = static_cast<size_t>(config.oversample);
    const size_t nraw = nbins * group;
    const double delta_hz = config.rbw_hz / static_cast<double>(group);

    // Per-raw-point transfer magnitudes, precomputed once.
    std::vector<double> freq_raw(nraw);
    std::vector<double> th_f(nraw), th_e(nraw);
    std::vector<Complex> ba_transfer(nraw);
    const double f_quantum =
        config.beams.probe_power_w > 0.0
            ? back_action_force_asd(config.cavity, {config.beams.probe_power_w, 1.0})
            : 0.0;
    const double f_classical = back_action_force_asd(
        config.cavity,
        {config.beams.noise.power_w, config.beams.noise.intensity_noise_rel_shot});
    const double f_drive = std::hypot(f_quantum, f_classical);
    const double shot =
        config.beams.probe_power_w > 0.0
            ? shot_noise_floor(config.cavity, config.beams.probe_power_w)
            : 0.0;

    for (size_t j = 0; j < nraw; ++j) {
        freq_raw[j] = config.span_lo_hz + (static_cast<double>(j) + 0.5) * delta_hz;
        const double w = freq_raw[j] * kTwoPi;
        th_f[j] = thermal_noise_asd(config.front, config.temperature_k, w);
        th_e[j] = thermal_noise_asd(config.end, config.temperature_k, w);
        ba_transfer[j] = pair_susceptibility(config.front, config.end, w) * f_drive;
    }

    // Noise-beam intensity noise leaking past the polarization rejection is
    // read as white phase noise, expressed as an equivalent length.
    double leak = 0.0;
    if (std::isfinite(config.leakage_db) && config.beams.noise.power_w > 0.0 &&
        config.beams.probe_power_w > 0.0) {
        leak = std::pow(10.0, config.leakage_db / 20.0) *
               config.beams.noise.intensity_noise_rel_shot *
               std::sqrt(config.beams.noise.power_w / config.beams.probe_power_w) * shot;
    }

    // Optional monochromatic signal: a fixed complex amplitude in one raw bin.
    ptrdiff_t sig_index = -1;
    Complex sig_amp{0.0, 0.0};
    if (config.beams.signal && config.beams.signal->amplitude > 0.0) {
        const auto& sig = *config.beams.signal;
        const double sig_hz = sig.frequency_rad_s / kTwoPi;
        require(sig_hz > config.span_lo_hz && sig_hz < config.span_hi_hz,
                "campaign: signal frequency outside the span");
        sig_index = static_cast<ptrdiff_t>((sig_hz - config.span_lo_hz) / delta_hz);
        sig_index = std::min<ptrdiff_t>(sig_index, static_cast<ptrdiff_t>(nraw) - 1);
        const double root_density = sig.amplitude / std::sqrt(delta_hz);
        switch (sig.target) {
            case SignalTarget::CavityLength:
                sig_amp = root_density;
                break;
            case SignalTarget::ForceOnFront:
                sig_amp = susceptibility(config.front, sig.frequency_rad_s) * root_density;
                break;
            case SignalTarget::ForceOnEnd:
                sig_amp = susceptibility(config.end, sig.frequency_rad_s) * root_density;
                break;
        }
    }

    std::vector<double> psd_measured(nraw, 0.0), psd_thermal(nraw, 0.0),
        psd_ba(nraw, 0.0), psd_signal(nraw, 0.0);

    for (int r = 0; r < config.averages; ++r) {
        const auto rr = static_cast<uint64_t>(r);
        SplitMix64 gen_ba(derive_stream_seed(config.seed, rr, kStreamBackAction));
        SplitMix64 gen_shot(derive_stream_seed(config.seed, rr, kStreamShot));
        SplitMix64 gen_thf(derive_stream_seed(config.seed, rr, kStreamThermalFront));
        SplitMix64 gen_the(derive_stream_seed(config.seed, rr, kStreamThermalEnd));
        SplitMix64 gen_leak(derive_stream_seed(config.seed, rr, kStreamLeakage));

        for (size_t j = 0; j < nraw; ++j) {
            const Complex z_ba = ba_transfer[j] * gen_ba.next_complex_gaussian();
            const Complex z_shot = shot * gen_shot.next_complex_gaussian();
            const Complex z_thf = -th_f[j] * gen_thf.next_complex_gaussian();
            const Complex z_the = th_e[j] * gen_the.next_complex_gaussian();
            Complex z = z_ba + z_shot + z_thf + z_the;
            if (leak > 0.0) z += leak * gen_leak.next_complex_gaussian();
            if (static_cast<ptrdiff_t>(j) == sig_index) z += sig_amp;

            psd_measured[j] += std::norm(z);
            psd_thermal[j] += std::norm(z_thf + z_the);
            psd_ba[j] += std::norm(z_ba);
            if (static_cast<ptrdiff_t>(j) == sig_index) psd_signal[j] += std::norm(sig_amp);
        }
    }

    const double inv_avg = 1.0 / static_cast<double>(config.averages);
    for (size_t j = 0; j < nraw; ++j) {
        psd_measured[j] *= inv_avg;
        psd_thermal[j] *= inv_avg;
        psd_ba[j] *= inv_avg;
        psd_signal[j] *= inv_avg;
    }

    const auto bin = [&](const std::vector<double>& psd, TraceChannel channel) {
        SpectrumTrace t = rbw_binning({freq_raw.front(), delta_hz, psd}, config.rbw_hz);
        t.channel = channel;
        return t;
    };
    result.traces.push_back(bin(psd_measured, TraceChannel::Measured));
    result.traces.push_back(bin(psd_thermal, TraceChannel::ThermalOnly));
    result.traces.push_back(bin(psd_ba, TraceChannel::BackActionOnly));
    result.traces.push_back(bin(psd_signal, TraceChannel::SignalOnly));

    // Expected single-mirror radiation-pressure responses at bin centers.
    SpectrumTrace ind_f, ind_e;
    ind_f.channel = TraceChannel::IndividualFront;
    ind_e.channel = TraceChannel::IndividualEnd;
    ind_f.freq_hz = result.traces.front().freq_hz;
    ind_e.freq_hz = result.traces.front().freq_hz;
    ind_f.asd.resize(ind_f.freq_hz.size());
    ind_e.asd.resize(ind_e.freq_hz.size());
    for (size_t b = 0; b < ind_f.freq_hz.size(); ++b) {
        const double w = ind_f.freq_hz[b] * kTwoPi;
        ind_f.asd[b] = std::abs(susceptibility(config.front, w)) * f_drive;
        ind_e.asd[b] = std::abs(susceptibility(config.end, w)) * f_drive;
    }
    result.traces.push_back(std::move(ind_f));
    result.traces.push_back(std::move(ind_e));

    result.meta.force_drive_asd_n = f_drive;
    result.meta.shot_floor_m = shot;
    result.meta.rbw_hz = config.rbw_hz;
    result.meta.averages = config.averages;
    result.meta.seed = config.seed;
    return result;
}

CampaignConfig inject_force_signal(CampaignConfig config, MirrorSide target,
                                   double amplitude_n, double frequency_rad_s) {
    require(amplitude_n >= 0.0, "inject_force_signal: amplitude must be >= 0");
    config.beams.signal = SignalDrive{
        target == MirrorSide::Front ? SignalTarget::ForceOnFront : SignalTarget::ForceOnEnd,
        amplitude_n, frequency_rad_s};
    return config;
}

}  // namespace dualcav
