#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dualcav/budget.hpp"
#include "dualcav/campaign.hpp"
#include "dualcav/constants.hpp"
#include "dualcav/fit.hpp"
#include "dualcav/random.hpp"
#include "dualcav/spectrum.hpp"

using namespace dualcav;

namespace {

const MechanicalMode kFrontMode(710.1e3 * kTwoPi, 0.64e-3, 10500.0, Complex{2e-8, 0.0});
const MechanicalMode kEndMode(710.9e3 * kTwoPi, 0.84e-3, 21500.0, Complex{2e-8, 0.0});

CampaignConfig base_config() {
    CampaignConfig cfg{
        CavityParams(810e-9, 230000.0, 0.25e-3),
        MirrorModel(MirrorSide::Front, {kFrontMode}),
        MirrorModel(MirrorSide::End, {kEndMode}),
        BeamSet{},
        300.0,
    };
    cfg.beams.probe_power_w = 50e-6;
    cfg.beams.noise.power_w = 300e-6;
    cfg.beams.noise.intensity_noise_rel_shot = 0.0;
    cfg.span_lo_hz = 709.5e3;
    cfg.span_hi_hz = 712.5e3;
    cfg.rbw_hz = 10.0;
    cfg.averages = 40;
    cfg.seed = 777;
    cfg.oversample = 8;
    return cfg;
}

bool identical_traces(const CampaignResult& a, const CampaignResult& b) {
    if (a.traces.size() != b.traces.size()) return false;
    for (size_t t = 0; t < a.traces.size(); ++t) {
        if (a.traces[t].channel != b.traces[t].channel) return false;
        if (a.traces[t].freq_hz != b.traces[t].freq_hz) return false;
        if (a.traces[t].asd != b.traces[t].asd) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("splitmix streams are deterministic and separated") {
    SplitMix64 a(42), b(42), c(43);
    for (int i = 0; i < 16; ++i) {
        const uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
    CHECK(derive_stream_seed(1, 0, 0) != derive_stream_seed(1, 0, 1));
    CHECK(derive_stream_seed(1, 0, 0) != derive_stream_seed(1, 1, 0));
    CHECK(derive_stream_seed(1, 0, 0) == derive_stream_seed(1, 0, 0));
}

TEST_CASE("gaussian draws have the right first two moments") {
    SplitMix64 gen(5);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0, cnorm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = gen.next_gaussian();
        sum += g;
        sum2 += g * g;
        cnorm += std::norm(gen.next_complex_gaussian());
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(1.0).scale(0.02));
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(cnorm / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rbw binning: white density is preserved, Parseval holds") {
    RawPsd raw{1000.0, 0.5, std::vector<double>(400, 3.6e-30)};
    const auto trace = rbw_binning(raw, 10.0);
    CHECK(trace.freq_hz.size() == 20);
    double in_power = 0.0, out_power = 0.0;
    for (double v : raw.psd) in_power += v * 0.5;
    for (size_t b = 0; b < trace.asd.size(); ++b) {
        CHECK(trace.asd[b] == doctest::Approx(std::sqrt(3.6e-30)).epsilon(1e-12));
        out_power += trace.asd[b] * trace.asd[b] * 10.0;
    }
    CHECK(out_power == doctest::Approx(in_power).epsilon(1e-3));
    // Bin centers: first bin spans [999.75, 1009.75].
    CHECK(trace.freq_hz.front() == doctest::Approx(1004.75).epsilon(1e-12));
}

TEST_CASE("rbw binning: a line spreads its power over one bin") {
    const double a = 2.5e-17;        // RMS line amplitude
    const double floor2 = 1.0e-36;   // white PSD underneath
    const double delta = 1.0, rbw = 10.0;
    RawPsd raw{500.0, delta, std::vector<double>(100, floor2)};
    raw.psd[37] += a * a / delta;
    const auto trace = rbw_binning(raw, rbw);
    const double expected = std::sqrt(a * a / rbw + floor2);
    CHECK(trace.asd[3] == doctest::Approx(expected).epsilon(1e-12));

    // Halving the RBW: noise bins unchanged, the line bin rises by sqrt(2).
    const auto fine = rbw_binning(raw, rbw / 2.0);
    CHECK(fine.asd[2] == doctest::Approx(std::sqrt(floor2)).epsilon(1e-12));
    const double line_coarse = std::sqrt(trace.asd[3] * trace.asd[3] - floor2);
    const double line_fine = std::sqrt(fine.asd[7] * fine.asd[7] - floor2);
    CHECK(line_fine == doctest::Approx(std::sqrt(2.0) * line_coarse).epsilon(1e-9));
}

TEST_CASE("rbw binning: input validation and partial trailing group") {
    CHECK_THROWS_AS(rbw_binning({0.0, 1.0, {}}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(rbw_binning({0.0, 2.0, {1.0, 1.0}}, 1.0), std::invalid_argument);
    RawPsd raw{0.0, 1.0, std::vector<double>(25, 1.0)};
    CHECK(rbw_binning(raw, 10.0).freq_hz.size() == 2);
}

TEST_CASE("campaign: identical config is bit-identical, seed changes it") {
    auto cfg = base_config();
    cfg.beams.noise.intensity_noise_rel_shot = 1e5;
    const auto a = run_campaign(cfg);
    const auto b = run_campaign(cfg);
    CHECK(identical_traces(a, b));

    auto other = cfg;
    other.seed = 778;
    CHECK_FALSE(identical_traces(a, run_campaign(other)));
}

TEST_CASE("campaign: zero-amplitude signal leaves the output bit-identical") {
    auto plain = base_config();
    const auto a = run_campaign(plain);
    auto with_zero = inject_force_signal(plain, MirrorSide::End, 0.0, 710.9e3 * kTwoPi);
    const auto b = run_campaign(with_zero);
    CHECK(identical_traces(a, b));
}

TEST_CASE("campaign: measured PSD decomposes into the channel PSDs") {
    auto cfg = base_config();
    cfg.beams.noise.intensity_noise_rel_shot = 2e5;
    cfg.averages = 120;
    cfg = inject_force_signal(cfg, MirrorSide::End, 2e-9, 710.9e3 * kTwoPi);
    const auto result = run_campaign(cfg);

    const auto& measured = result.trace(TraceChannel::Measured);
    const auto& thermal = result.trace(TraceChannel::ThermalOnly);
    const auto& ba = result.trace(TraceChannel::BackActionOnly);
    const auto& signal = result.trace(TraceChannel::SignalOnly);
    const double shot2 = result.meta.shot_floor_m * result.meta.shot_floor_m;

    for (size_t i = 0; i < measured.asd.size(); ++i) {
        const double lhs = measured.asd[i] * measured.asd[i];
        const double rhs = thermal.asd[i] * thermal.asd[i] + ba.asd[i] * ba.asd[i] +
                           signal.asd[i] * signal.asd[i] + shot2;
        CHECK(lhs == doctest::Approx(rhs).epsilon(0.15));
    }
}

TEST_CASE("campaign: identical mirrors double the back-action channel exactly") {
    auto twin = base_config();
    twin.front = MirrorModel(MirrorSide::Front, {kFrontMode});
    twin.end = MirrorModel(MirrorSide::End, {kFrontMode});
    twin.beams.noise.intensity_noise_rel_shot = 1e5;
    twin.span_lo_hz = 709.6e3;
    twin.span_hi_hz = 710.6e3;

    auto solo = twin;
    // A practically rigid end mirror removes its response.
    solo.end = MirrorModel(MirrorSide::End,
                           {MechanicalMode(710.1e3 * kTwoPi, 1e18, 10500.0)});

    const auto pair = run_campaign(twin);
    const auto single = run_campaign(solo);
    const auto& ba_pair = pair.trace(TraceChannel::BackActionOnly);
    const auto& ba_single = single.trace(TraceChannel::BackActionOnly);
    for (size_t i = 0; i < ba_pair.asd.size(); ++i) {
        CHECK(ba_pair.asd[i] == doctest::Approx(2.0 * ba_single.asd[i]).epsilon(1e-9));
    }

    // With the end mirror removed the stochastic back-action channel tracks
    // the analytic individual_front channel in the ensemble mean.
    const auto& ind_front = single.trace(TraceChannel::IndividualFront);
    double ratio = 0.0;
    for (size_t i = 0; i < ba_single.asd.size(); ++i) {
        const double psd_num = ba_single.asd[i] * ba_single.asd[i];
        const double psd_den = ind_front.asd[i] * ind_front.asd[i];
        ratio += psd_num / psd_den;
    }
    ratio /= static_cast<double>(ba_single.asd.size());
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("campaign: thermal channel converges to the analytic FDT spectrum") {
    auto cfg = base_config();
    cfg.averages = 400;
    cfg.oversample = 8;
    const auto result = run_campaign(cfg);
    const auto& thermal = result.trace(TraceChannel::ThermalOnly);
    const MirrorModel front(MirrorSide::Front, {kFrontMode});
    const MirrorModel end(MirrorSide::End, {kEndMode});

    const double tol = 3.0 / std::sqrt(static_cast<double>(cfg.averages));
    for (size_t i = 0; i < thermal.asd.size(); ++i) {
        const double w = thermal.freq_hz[i] * kTwoPi;
        const double expected = std::hypot(thermal_noise_asd(front, 300.0, w),
                                           thermal_noise_asd(end, 300.0, w));
        CHECK(thermal.asd[i] / expected == doctest::Approx(1.0).epsilon(tol));
    }
}

TEST_CASE("campaign: force line height matches the closed form") {
    auto cfg = base_config();
    cfg.averages = 200;
    const double force = 3e-9;
    const double w_sig = 710.9e3 * kTwoPi;
    cfg = inject_force_signal(cfg, MirrorSide::End, force, w_sig);
    const auto result = run_campaign(cfg);

    // The deterministic signal channel carries exactly the line density.
    const auto& signal = result.trace(TraceChannel::SignalOnly);
    size_t i_sig = 0;
    for (size_t i = 1; i < signal.freq_hz.size(); ++i) {
        if (signal.asd[i] > signal.asd[i_sig]) i_sig = i;
    }
    const double expected =
        std::abs(susceptibility(cfg.end, w_sig)) * force / std::sqrt(cfg.rbw_hz);
    CHECK(signal.asd[i_sig] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(signal.freq_hz[i_sig] == doctest::Approx(710.9e3).epsilon(20.0 / 710.9e3));

    // And the measured bin shows thermal power plus the line power.
    const auto& measured = result.trace(TraceChannel::Measured);
    const auto& thermal = result.trace(TraceChannel::ThermalOnly);
    const double line2 = measured.asd[i_sig] * measured.asd[i_sig] -
                         thermal.asd[i_sig] * thermal.asd[i_sig];
    CHECK(line2 == doctest::Approx(expected * expected).epsilon(0.2));
}

TEST_CASE("campaign: validation and warning paths") {
    auto cfg = base_config();
    cfg.span_hi_hz = 2.0e6;  // beyond the cavity bandwidth
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);

    cfg = base_config();
    cfg.span_hi_hz = cfg.span_lo_hz + 50.0;  // narrower than 10 x RBW
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);

    cfg = base_config();
    cfg.averages = 0;
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);

    cfg = base_config();
    cfg.beams.signal = SignalDrive{SignalTarget::CavityLength, 4e-17, 500e3 * kTwoPi};
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);

    cfg = base_config();
    const auto fine = run_campaign(cfg);
    bool has_band_warning = false;
    for (const auto& w : fine.warnings) {
        if (w.find("bandwidth/3") != std::string::npos) has_band_warning = true;
    }
    CHECK(has_band_warning);

    cfg.rbw_hz = 1000.0;  // coarser than the 800 Hz doublet splitting
    cfg.span_hi_hz = 725e3;
    const auto coarse = run_campaign(cfg);
    bool has_rbw_warning = false;
    for (const auto& w : coarse.warnings) {
        if (w.find("RBW") != std::string::npos) has_rbw_warning = true;
    }
    CHECK(has_rbw_warning);
}

TEST_CASE("campaign: polarization leakage defaults to off") {
    auto cfg = base_config();
    cfg.beams.noise.intensity_noise_rel_shot = 1e5;
    const auto off = run_campaign(cfg);
    auto explicit_off = cfg;
    explicit_off.leakage_db = -std::numeric_limits<double>::infinity();
    CHECK(identical_traces(off, run_campaign(explicit_off)));

    // Strong leakage raises the measured floor away from the resonances.
    auto leaky = cfg;
    leaky.leakage_db = 60.0;
    const auto on = run_campaign(leaky);
    const auto& m_off = off.trace(TraceChannel::Measured);
    const auto& m_on = on.trace(TraceChannel::Measured);
    CHECK(m_on.asd.front() > 2.0 * m_off.asd.front());
}

TEST_CASE("campaign: length signal is visible in the dip, buried on resonance") {
    auto cfg = base_config();
    cfg.beams.noise.intensity_noise_rel_shot = 8.1e4;  // fig2b-level drive
    cfg.averages = 100;
    cfg.oversample = 16;

    const MirrorModel front(MirrorSide::Front, {kFrontMode});
    const MirrorModel end(MirrorSide::End, {kEndMode});
    const double w_dip =
        find_anti_resonance(front, end, 710.1e3 * kTwoPi, 710.9e3 * kTwoPi).dip_rad_s;

    cfg.beams.signal = SignalDrive{SignalTarget::CavityLength, 4e-17, w_dip};
    const auto at_dip = run_campaign(cfg);

    // Signal power against the noise channels at the signal's own bin.
    const auto channel_snr = [&](const CampaignResult& result, double w_line) {
        const auto& signal = result.trace(TraceChannel::SignalOnly);
        const auto& thermal = result.trace(TraceChannel::ThermalOnly);
        const auto& ba = result.trace(TraceChannel::BackActionOnly);
        size_t i = 0;
        for (size_t j = 1; j < signal.freq_hz.size(); ++j) {
            if (std::abs(signal.freq_hz[j] - w_line / kTwoPi) <
                std::abs(signal.freq_hz[i] - w_line / kTwoPi)) {
                i = j;
            }
        }
        const double noise2 = thermal.asd[i] * thermal.asd[i] + ba.asd[i] * ba.asd[i] +
                              result.meta.shot_floor_m * result.meta.shot_floor_m;
        return signal.asd[i] * signal.asd[i] / noise2;
    };
    CHECK(channel_snr(at_dip, w_dip) > 1.5);
    // And the line stands above the locally read floor of the measured trace.
    CHECK(measure_line_snr(at_dip.trace(TraceChannel::Measured), w_dip).snr_power > 1.0);

    cfg.beams.signal->frequency_rad_s = 710.1e3 * kTwoPi;
    const auto at_res = run_campaign(cfg);
    CHECK(channel_snr(at_res, 710.1e3 * kTwoPi) < 1.0);
    const auto snr_res =
        measure_line_snr(at_res.trace(TraceChannel::Measured), 710.1e3 * kTwoPi);
    CHECK(snr_res.snr_power < 1.0);
}
