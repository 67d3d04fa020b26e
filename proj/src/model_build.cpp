#include "dualcav/model_build.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dualcav/constants.hpp"

namespace dualcav::cli {

namespace {

void check_positive(const ConfigSection& s, const std::string& key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("field '" + key + "' in [" + s.path + "] must be > 0 (got " +
                              std::to_string(v) + ")",
                          s.line);
    }
}

void check_nonnegative(const ConfigSection& s, const std::string& key, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("field '" + key + "' in [" + s.path + "] must be >= 0 (got " +
                              std::to_string(v) + ")",
                          s.line);
    }
}

MirrorModel read_mirror(const Config& cfg, MirrorSide side) {
    const std::string base = std::string("mirror.") + (side == MirrorSide::Front ? "front" : "end");
    const auto mode_sections = cfg.sections(base + ".mode");
    if (mode_sections.empty()) {
        throw ConfigError("missing section [" + base + ".mode]");
    }
    std::vector<MechanicalMode> modes;
    for (const auto* s : mode_sections) {
        const double freq = Config::get_double(*s, "freq_hz");
        const double mass = Config::get_double(*s, "mass_kg");
        const double quality = Config::get_double(*s, "quality");
        check_positive(*s, "freq_hz", freq);
        check_positive(*s, "mass_kg", mass);
        check_positive(*s, "quality", quality);
        const double bg_re = Config::get_double_opt(*s, "background_re_m_per_n").value_or(0.0);
        const double bg_im = Config::get_double_opt(*s, "background_im_m_per_n").value_or(0.0);
        if (bg_im < 0.0) {
            throw ConfigError("field 'background_im_m_per_n' in [" + s->path +
                                  "] must be >= 0 (dissipative convention)",
                              s->line);
        }
        modes.emplace_back(freq * kTwoPi, mass, quality, Complex{bg_re, bg_im});
    }
    return MirrorModel(side, std::move(modes));
}

double max_thermal_over_individual(const CampaignConfig& campaign, double force_asd_unit) {
    // Largest ratio of summed thermal noise to the quadrature sum of the
    // expected single-mirror radiation-pressure responses at unit noise level.
    // Scanned across the doublet region (resonances widened by five
    // linewidths, clipped to the span): far off resonance the individual
    // responses partially cancel against their own backgrounds, which would
    // inflate the level without any physical content.
    double region_lo_hz = campaign.span_hi_hz, region_hi_hz = campaign.span_lo_hz;
    for (const MirrorModel* mirror : {&campaign.front, &campaign.end}) {
        for (const auto& mode : mirror->modes) {
            const double width_hz = 5.0 * mode.linewidth_rad_s() / kTwoPi;
            region_lo_hz = std::min(region_lo_hz, mode.resonance_hz() - width_hz);
            region_hi_hz = std::max(region_hi_hz, mode.resonance_hz() + width_hz);
        }
    }
    region_lo_hz = std::max(region_lo_hz, campaign.span_lo_hz);
    region_hi_hz = std::min(region_hi_hz, campaign.span_hi_hz);

    const size_t nbins = static_cast<size_t>(
        std::floor((campaign.span_hi_hz - campaign.span_lo_hz) / campaign.rbw_hz));
    double worst = 0.0;
    for (size_t b = 0; b < nbins; ++b) {
        const double nu = campaign.span_lo_hz + (static_cast<double>(b) + 0.5) * campaign.rbw_hz;
        if (nu < region_lo_hz || nu > region_hi_hz) continue;
        const double w = nu * kTwoPi;
        const double th_f = thermal_noise_asd(campaign.front, campaign.temperature_k, w);
        const double th_e = thermal_noise_asd(campaign.end, campaign.temperature_k, w);
        const double chi_f = std::abs(susceptibility(campaign.front, w));
        const double chi_e = std::abs(susceptibility(campaign.end, w));
        const double individual = std::hypot(chi_f, chi_e) * force_asd_unit;
        if (individual > 0.0) {
            worst = std::max(worst, std::hypot(th_f, th_e) / individual);
        }
    }
    if (worst == 0.0) {
        throw ConfigError("'level_above_thermal_db': no resonance inside the campaign span");
    }
    return worst;
}

}  // namespace

ModelBundle build_model(const Config& cfg) {
    const ConfigSection* cavity_s = cfg.unique_section("cavity");
    if (!cavity_s) throw ConfigError("missing section [cavity]");
    const double wavelength = Config::get_double(*cavity_s, "wavelength_m");
    const double finesse = Config::get_double(*cavity_s, "finesse");
    const double length = Config::get_double(*cavity_s, "length_m");
    check_positive(*cavity_s, "wavelength_m", wavelength);
    check_positive(*cavity_s, "finesse", finesse);
    check_positive(*cavity_s, "length_m", length);
    std::optional<double> bandwidth_rad;
    if (const auto bw = Config::get_double_opt(*cavity_s, "bandwidth_hz")) {
        check_positive(*cavity_s, "bandwidth_hz", *bw);
        bandwidth_rad = *bw * kTwoPi;
    }

    double temperature = 300.0;
    if (const ConfigSection* env = cfg.unique_section("environment")) {
        temperature = Config::get_double(*env, "temperature_k");
        check_positive(*env, "temperature_k", temperature);
    }

    ModelBundle bundle{
        CavityParams(wavelength, finesse, length, bandwidth_rad),
        read_mirror(cfg, MirrorSide::Front),
        read_mirror(cfg, MirrorSide::End),
        BeamSet{},
        temperature,
        std::nullopt,
        std::nullopt,
        FitSettings{},
    };

    const ConfigSection* beams_s = cfg.unique_section("beams");
    if (!beams_s) throw ConfigError("missing section [beams]");
    bundle.beams.probe_power_w = Config::get_double(*beams_s, "probe_power_w");
    check_positive(*beams_s, "probe_power_w", bundle.beams.probe_power_w);

    // Campaign grid first: the beam helpers below may need it.
    struct RawCampaign {
        double span_lo_hz, span_hi_hz, rbw_hz, drive_bandwidth_hz, leakage_db;
        int averages, oversample;
        uint64_t seed;
    };
    std::optional<RawCampaign> raw_campaign;
    if (const ConfigSection* cs = cfg.unique_section("campaign")) {
        RawCampaign rc{};
        rc.span_lo_hz = Config::get_double(*cs, "span_lo_hz");
        rc.span_hi_hz = Config::get_double(*cs, "span_hi_hz");
        rc.rbw_hz = Config::get_double(*cs, "rbw_hz");
        check_positive(*cs, "span_lo_hz", rc.span_lo_hz);
        check_positive(*cs, "rbw_hz", rc.rbw_hz);
        if (!(rc.span_hi_hz > rc.span_lo_hz)) {
            throw ConfigError("field 'span_hi_hz' in [campaign] must exceed span_lo_hz",
                              cs->line);
        }
        rc.drive_bandwidth_hz =
            Config::get_double_opt(*cs, "drive_bandwidth_hz").value_or(600.0);
        rc.averages = Config::get_int(*cs, "averages");
        if (rc.averages < 1) {
            throw ConfigError("field 'averages' in [campaign] must be >= 1", cs->line);
        }
        rc.seed = Config::get_u64(*cs, "seed");
        rc.oversample = Config::get_int_opt(*cs, "oversample").value_or(8);
        if (rc.oversample < 1) {
            throw ConfigError("field 'oversample' in [campaign] must be >= 1", cs->line);
        }
        rc.leakage_db = Config::get_double_opt(*cs, "leakage_db")
                            .value_or(-std::numeric_limits<double>::infinity());
        raw_campaign = rc;
    }

    auto make_campaign = [&](const BeamSet& beams) {
        CampaignConfig cc{bundle.cavity, bundle.front, bundle.end, beams,
                          bundle.temperature_k};
        cc.span_lo_hz = raw_campaign->span_lo_hz;
        cc.span_hi_hz = raw_campaign->span_hi_hz;
        cc.rbw_hz = raw_campaign->rbw_hz;
        cc.drive_bandwidth_hz = raw_campaign->drive_bandwidth_hz;
        cc.averages = raw_campaign->averages;
        cc.seed = raw_campaign->seed;
        cc.oversample = raw_campaign->oversample;
        cc.leakage_db = raw_campaign->leakage_db;
        return cc;
    };

    // Noise beam: explicit level, or derived so the expected single-mirror
    // radiation-pressure spectra clear the summed thermal noise by N dB
    // (power) at every frequency of the campaign span.
    if (const ConfigSection* ns = cfg.unique_section("beams.noise")) {
        bundle.beams.noise.power_w = Config::get_double(*ns, "power_w");
        check_nonnegative(*ns, "power_w", bundle.beams.noise.power_w);
        const auto level = Config::get_double_opt(*ns, "level_rel_shot");
        const auto level_db = Config::get_double_opt(*ns, "level_above_thermal_db");
        if (level && level_db) {
            throw ConfigError(
                "give either 'level_rel_shot' or 'level_above_thermal_db' in "
                "[beams.noise], not both",
                ns->line);
        }
        if (level) {
            check_nonnegative(*ns, "level_rel_shot", *level);
            bundle.beams.noise.intensity_noise_rel_shot = *level;
        } else if (level_db) {
            if (!raw_campaign) {
                throw ConfigError(
                    "'level_above_thermal_db' needs a [campaign] section for the span",
                    ns->line);
            }
            if (!(bundle.beams.noise.power_w > 0.0)) {
                throw ConfigError(
                    "'level_above_thermal_db' needs a positive noise beam power", ns->line);
            }
            const double unit_force = back_action_force_asd(
                bundle.cavity, {bundle.beams.noise.power_w, 1.0});
            BeamSet probe_only = bundle.beams;
            probe_only.noise = {};
            const CampaignConfig grid = make_campaign(probe_only);
            const double worst = max_thermal_over_individual(grid, unit_force);
            bundle.beams.noise.intensity_noise_rel_shot =
                std::pow(10.0, *level_db / 20.0) * worst;
        }
    }

    // Signal drive: explicit amplitude and frequency, or derived.
    if (const ConfigSection* ss = cfg.unique_section("beams.signal")) {
        const std::string target_str = Config::get_string(*ss, "target");
        SignalTarget target;
        if (target_str == "cavity_length") {
            target = SignalTarget::CavityLength;
        } else if (target_str == "force_on_front") {
            target = SignalTarget::ForceOnFront;
        } else if (target_str == "force_on_end") {
            target = SignalTarget::ForceOnEnd;
        } else {
            throw ConfigError("field 'target' in [beams.signal] must be cavity_length, "
                                  "force_on_front or force_on_end (got '" +
                                  target_str + "')",
                              ss->line);
        }

        double frequency_rad = 0.0;
        const auto freq_hz = Config::get_double_opt(*ss, "freq_hz");
        const auto freq_at = Config::get_string_opt(*ss, "freq_at");
        if (static_cast<bool>(freq_hz) == static_cast<bool>(freq_at)) {
            throw ConfigError(
                "give exactly one of 'freq_hz' or 'freq_at' in [beams.signal]", ss->line);
        }
        if (freq_hz) {
            check_positive(*ss, "freq_hz", *freq_hz);
            frequency_rad = *freq_hz * kTwoPi;
        } else {
            const double w_front = bundle.front.modes.front().resonance_rad_s;
            const double w_end = bundle.end.modes.front().resonance_rad_s;
            if (*freq_at == "primary_dip") {
                frequency_rad =
                    find_anti_resonance(bundle.front, bundle.end, w_front, w_end).dip_rad_s;
            } else if (*freq_at == "secondary_dip") {
                if (!raw_campaign) {
                    throw ConfigError("'freq_at = secondary_dip' needs a [campaign] span",
                                      ss->line);
                }
                const auto report = find_anti_resonance(
                    bundle.front, bundle.end, w_end + 100.0 * kTwoPi,
                    raw_campaign->span_hi_hz * kTwoPi);
                frequency_rad = report.dip_rad_s;
            } else {
                throw ConfigError("field 'freq_at' in [beams.signal] must be primary_dip "
                                      "or secondary_dip (got '" +
                                      *freq_at + "')",
                                  ss->line);
            }
        }

        double amplitude = 0.0;
        const auto amp_m = Config::get_double_opt(*ss, "amplitude_m");
        const auto amp_n = Config::get_double_opt(*ss, "amplitude_n");
        const auto below_db = Config::get_double_opt(*ss, "level_below_backaction_db");
        const int amp_keys = (amp_m ? 1 : 0) + (amp_n ? 1 : 0) + (below_db ? 1 : 0);
        if (amp_keys != 1) {
            throw ConfigError("give exactly one of 'amplitude_m', 'amplitude_n' or "
                                  "'level_below_backaction_db' in [beams.signal]",
                              ss->line);
        }
        if (amp_m) {
            if (target != SignalTarget::CavityLength) {
                throw ConfigError("'amplitude_m' only applies to target = cavity_length",
                                  ss->line);
            }
            check_nonnegative(*ss, "amplitude_m", *amp_m);
            amplitude = *amp_m;
        } else if (amp_n) {
            if (target == SignalTarget::CavityLength) {
                throw ConfigError("'amplitude_n' needs a force target", ss->line);
            }
            check_nonnegative(*ss, "amplitude_n", *amp_n);
            amplitude = *amp_n;
        } else {
            if (target == SignalTarget::CavityLength) {
                throw ConfigError("'level_below_backaction_db' needs a force target",
                                  ss->line);
            }
            if (!raw_campaign) {
                throw ConfigError("'level_below_backaction_db' needs a [campaign] section",
                                  ss->line);
            }
            // Force whose displacement line sits the given number of dB below
            // the radiation-pressure noise in one RBW bin at the sensor's
            // resonance.
            const MirrorModel& sensor =
                target == SignalTarget::ForceOnFront ? bundle.front : bundle.end;
            const double w_res = sensor.modes.front().resonance_rad_s;
            const double f_quantum =
                back_action_force_asd(bundle.cavity, {bundle.beams.probe_power_w, 1.0});
            const double f_classical = back_action_force_asd(
                bundle.cavity,
                {bundle.beams.noise.power_w, bundle.beams.noise.intensity_noise_rel_shot});
            const double f_drive = std::hypot(f_quantum, f_classical);
            const double ba_in_bin =
                std::abs(pair_susceptibility(bundle.front, bundle.end, w_res)) * f_drive *
                std::sqrt(raw_campaign->rbw_hz);
            const double chi_sensor = std::abs(susceptibility(sensor, w_res));
            amplitude = std::pow(10.0, -*below_db / 20.0) * ba_in_bin / chi_sensor;
        }

        bundle.beams.signal = SignalDrive{target, amplitude, frequency_rad};
    }

    bundle.beams.validate();
    if (raw_campaign) bundle.campaign = make_campaign(bundle.beams);

    if (const ConfigSection* bs = cfg.unique_section("budget")) {
        BudgetSettings b;
        b.grid_lo_hz = Config::get_double(*bs, "grid_lo_hz");
        b.grid_hi_hz = Config::get_double(*bs, "grid_hi_hz");
        b.points = Config::get_int(*bs, "points");
        check_positive(*bs, "grid_lo_hz", b.grid_lo_hz);
        if (!(b.grid_hi_hz > b.grid_lo_hz)) {
            throw ConfigError("field 'grid_hi_hz' in [budget] must exceed grid_lo_hz",
                              bs->line);
        }
        if (b.points < 2) {
            throw ConfigError("field 'points' in [budget] must be >= 2", bs->line);
        }
        b.dip_bracket_lo_hz = Config::get_double_opt(*bs, "dip_bracket_lo_hz")
                                  .value_or(bundle.front.modes.front().resonance_hz());
        b.dip_bracket_hi_hz = Config::get_double_opt(*bs, "dip_bracket_hi_hz")
                                  .value_or(bundle.end.modes.front().resonance_hz());
        if (!(b.dip_bracket_hi_hz > b.dip_bracket_lo_hz)) {
            throw ConfigError("dip bracket in [budget] must have lo < hi", bs->line);
        }
        bundle.budget = b;
    }

    if (const ConfigSection* fs = cfg.unique_section("fit")) {
        FitSettings f;
        const auto g_ff = Config::get_double_opt(*fs, "guess_freq_front_hz");
        const auto g_fe = Config::get_double_opt(*fs, "guess_freq_end_hz");
        const auto g_mf = Config::get_double_opt(*fs, "guess_mass_front_kg");
        const auto g_me = Config::get_double_opt(*fs, "guess_mass_end_kg");
        const auto g_qf = Config::get_double_opt(*fs, "guess_q_front");
        const auto g_qe = Config::get_double_opt(*fs, "guess_q_end");
        const auto g_fl = Config::get_double_opt(*fs, "guess_floor_asd");
        const int given = (g_ff ? 1 : 0) + (g_fe ? 1 : 0) + (g_mf ? 1 : 0) + (g_me ? 1 : 0) +
                          (g_qf ? 1 : 0) + (g_qe ? 1 : 0) + (g_fl ? 1 : 0);
        if (given != 0 && given != 7) {
            throw ConfigError("give all seven guess_* keys in [fit] or none", fs->line);
        }
        if (given == 7) {
            f.guess = DoubletGuess{*g_ff * kTwoPi, *g_fe * kTwoPi, *g_mf, *g_me,
                                   *g_qf, *g_qe, *g_fl};
        }
        if (const auto mask = Config::get_string_opt(*fs, "mask")) {
            std::istringstream items(*mask);
            std::string item;
            while (std::getline(items, item, ',')) {
                const size_t colon = item.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError("field 'mask' in [fit] must be lo:hi[,lo:hi...]",
                                      fs->line);
                }
                try {
                    const double lo = std::stod(item.substr(0, colon));
                    const double hi = std::stod(item.substr(colon + 1));
                    if (!(hi > lo)) throw std::invalid_argument("order");
                    f.options.mask_hz.emplace_back(lo, hi);
                } catch (const std::exception&) {
                    throw ConfigError("field 'mask' in [fit]: bad range '" + item + "'",
                                      fs->line);
                }
            }
        }
        if (const auto bin = Config::get_string_opt(*fs, "bin_integration")) {
            if (*bin == "auto") {
                f.options.bin_width_hz = std::nullopt;
            } else if (*bin == "none") {
                f.options.bin_width_hz = 0.0;
            } else {
                try {
                    f.options.bin_width_hz = std::stod(*bin);
                } catch (const std::exception&) {
                    throw ConfigError(
                        "field 'bin_integration' in [fit] must be auto, none or a width in Hz",
                        fs->line);
                }
            }
        }
        f.options.averages = Config::get_double_opt(*fs, "averages")
                                 .value_or(raw_campaign ? raw_campaign->averages : 1.0);
        bundle.fit = std::move(f);
    }

    if (const auto unused = cfg.first_unused()) {
        throw ConfigError("unknown key '" + unused->key + "' in [" + unused->section +
                              "] at line " + std::to_string(unused->line),
                          unused->line);
    }
    return bundle;
}

namespace {

const char* kPaperDefaults = R"(# Dual-mirror cavity baseline: quiet probe, thermal-noise-dominated band.
[cavity]
wavelength_m = 810e-9
finesse = 230000
length_m = 0.25e-3

[environment]
temperature_k = 300

[mirror.front.mode]
freq_hz = 710.1e3
mass_kg = 0.64e-3
quality = 10500
background_re_m_per_n = 2e-8

[mirror.end.mode]
freq_hz = 710.9e3
mass_kg = 0.84e-3
quality = 21500
background_re_m_per_n = 2e-8

[beams]
probe_power_w = 50e-6

[beams.noise]
power_w = 300e-6
level_rel_shot = 0          # noise beam off

[campaign]
span_lo_hz = 709.5e3
span_hi_hz = 712.5e3
rbw_hz = 10
drive_bandwidth_hz = 600
averages = 100
seed = 20260808
oversample = 34

[budget]
grid_lo_hz = 680e3
grid_hi_hz = 740e3
points = 6000
dip_bracket_lo_hz = 710.1e3
dip_bracket_hi_hz = 710.9e3

[fit]
guess_freq_front_hz = 710.0e3
guess_freq_end_hz = 711.0e3
guess_mass_front_kg = 0.5e-3
guess_mass_end_kg = 1.0e-3
guess_q_front = 8000
guess_q_end = 15000
guess_floor_asd = 1e-18
bin_integration = auto
)";

const char* kFig2b = R"(# Cancellation-dip demonstration: strong common intensity noise on both
# mirrors, no injected signal.
[cavity]
wavelength_m = 810e-9
finesse = 230000
length_m = 0.25e-3

[environment]
temperature_k = 300

[mirror.front.mode]
freq_hz = 710.1e3
mass_kg = 0.64e-3
quality = 10500
background_re_m_per_n = 2e-8

[mirror.end.mode]
freq_hz = 710.9e3
mass_kg = 0.84e-3
quality = 21500
background_re_m_per_n = 2e-8

[beams]
probe_power_w = 50e-6

[beams.noise]
power_w = 300e-6
level_above_thermal_db = 20   # per-mirror responses clear thermal by 20 dB across the doublet

[campaign]
span_lo_hz = 709.5e3
span_hi_hz = 712.5e3
rbw_hz = 10
drive_bandwidth_hz = 600
averages = 100
seed = 20260808
oversample = 34

[budget]
grid_lo_hz = 680e3
grid_hi_hz = 740e3
points = 6000
dip_bracket_lo_hz = 710.1e3
dip_bracket_hi_hz = 710.9e3

[fit]
guess_freq_front_hz = 710.0e3
guess_freq_end_hz = 711.0e3
guess_mass_front_kg = 0.5e-3
guess_mass_end_kg = 1.0e-3
guess_q_front = 8000
guess_q_end = 15000
guess_floor_asd = 1e-18
bin_integration = auto
)";

const char* kFig3c = R"(# Weak-force scenario: monochromatic force on the front mirror at the
# cancellation dip, 5 dB below the radiation-pressure level at its resonance.
# The noise beam runs harder than in fig2b so the dip stays
# radiation-pressure-limited with the force line on top.
[cavity]
wavelength_m = 810e-9
finesse = 230000
length_m = 0.25e-3

[environment]
temperature_k = 300

[mirror.front.mode]
freq_hz = 710.1e3
mass_kg = 0.64e-3
quality = 10500
background_re_m_per_n = 2e-8

[mirror.end.mode]
freq_hz = 710.9e3
mass_kg = 0.84e-3
quality = 21500
background_re_m_per_n = 2e-8

[beams]
probe_power_w = 50e-6

[beams.noise]
power_w = 300e-6
level_above_thermal_db = 30

[beams.signal]
target = force_on_front
level_below_backaction_db = 5
freq_at = primary_dip

[campaign]
span_lo_hz = 709.5e3
span_hi_hz = 712.5e3
rbw_hz = 10
drive_bandwidth_hz = 600
averages = 100
seed = 20260808
oversample = 34

[budget]
grid_lo_hz = 680e3
grid_hi_hz = 740e3
points = 6000
dip_bracket_lo_hz = 710.1e3
dip_bracket_hi_hz = 710.9e3

[fit]
guess_freq_front_hz = 710.0e3
guess_freq_end_hz = 711.0e3
guess_mass_front_kg = 0.5e-3
guess_mass_end_kg = 1.0e-3
guess_q_front = 8000
guess_q_end = 15000
guess_floor_asd = 1e-18
bin_integration = auto
)";

}  // namespace

const char* scenario_text(const std::string& name) {
    if (name == "paper_defaults") return kPaperDefaults;
    if (name == "fig2b") return kFig2b;
    if (name == "fig3c") return kFig3c;
    return nullptr;
}

}  // namespace dualcav::cli
