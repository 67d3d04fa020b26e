#include "dualcav/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>

#include <json.hpp>

#include "dualcav/campaign.hpp"
#include "dualcav/config.hpp"
#include "dualcav/constants.hpp"
#include "dualcav/fit.hpp"
#include "dualcav/model_build.hpp"
#include "dualcav/report.hpp"

namespace dualcav::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

Config load_config(const CommandContext& ctx) {
    if (!ctx.scenario.empty()) {
        const char* text = scenario_text(ctx.scenario);
        if (!text) {
            throw ConfigError("unknown scenario '" + ctx.scenario +
                              "' (expected paper_defaults, fig2b or fig3c)");
        }
        return Config::parse(text, "scenario:" + ctx.scenario);
    }
    if (ctx.config_path.empty()) {
        throw ConfigError("no config given: use --config FILE or --scenario NAME");
    }
    return Config::parse_file(ctx.config_path);
}

struct OutputSink {
    fs::path dir;
    RunManifest manifest;

    void write(const std::string& name, const std::string& content) {
        atomic_write_file((dir / name).string(), content);
        manifest.outputs.push_back(name);
    }
};

OutputSink make_sink(const CommandContext& ctx, const Config& cfg, const char* command) {
    if (ctx.out_dir.empty()) throw ConfigError("missing output directory (--out)");
    fs::create_directories(ctx.out_dir);
    OutputSink sink;
    sink.dir = ctx.out_dir;
    sink.manifest.tool_version = kToolVersion;
    sink.manifest.command = command;
    sink.manifest.config_digest = fnv1a64_hex(cfg.text());
    return sink;
}

nlohmann::json dip_json(const AntiResonanceReport& r) {
    nlohmann::json j;
    j["freq_hz"] = r.dip_rad_s / kTwoPi;
    j["residual_m_per_n"] = r.residual_m_per_n;
    j["suppression_power"] = r.suppression_power;
    j["suppression_amplitude"] = r.suppression_amplitude;
    j["suppression_vs_front_power"] = r.suppression_vs_front_power;
    j["suppression_vs_end_power"] = r.suppression_vs_end_power;
    j["bracket_lo_hz"] = r.bracket_lo_rad_s / kTwoPi;
    j["bracket_hi_hz"] = r.bracket_hi_rad_s / kTwoPi;
    j["interior_minimum"] = r.interior_minimum;
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

int run_guarded(const char* command, const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << command << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << command << ": physics invariant violation: " << e.what() << '\n';
        return kExitPhysics;
    } catch (const std::exception& e) {
        std::cerr << command << ": error: " << e.what() << '\n';
        return kExitConfig;
    }
}

void finalize(OutputSink& sink, Clock::time_point start) {
    sink.manifest.duration_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    atomic_write_file((sink.dir / "manifest.json").string(), manifest_json(sink.manifest));
}

void try_plot(OutputSink& sink, const std::string& name, const std::string& title,
              const std::vector<PlotSeries>& series, bool no_plot) {
    if (no_plot) return;
    try {
        sink.write(name, svg_line_plot(title, "frequency (Hz)", "ASD (m/sqrt(Hz))", series));
    } catch (const std::exception& e) {
        sink.manifest.warnings.push_back(std::string("plot failed: ") + e.what());
    }
}

}  // namespace

int cmd_budget(const CommandContext& ctx) {
    return run_guarded("budget", [&] {
        const auto start = Clock::now();
        const Config cfg = load_config(ctx);
        const ModelBundle bundle = build_model(cfg);
        if (!bundle.budget) throw ConfigError("missing section [budget]");
        const BudgetSettings& settings = *bundle.budget;

        std::vector<double> grid(static_cast<size_t>(settings.points));
        const double step_hz = (settings.grid_hi_hz - settings.grid_lo_hz) /
                               static_cast<double>(settings.points - 1);
        for (size_t i = 0; i < grid.size(); ++i) {
            grid[i] = (settings.grid_lo_hz + step_hz * static_cast<double>(i)) * kTwoPi;
        }

        const SensitivityCurve curve = build_sensitivity_curve(
            bundle.cavity, bundle.beams, bundle.front, bundle.end, bundle.temperature_k,
            std::move(grid));

        OutputSink sink = make_sink(ctx, cfg, "budget");
        for (const auto& w : curve.meta.warnings) sink.manifest.warnings.push_back(w);
        sink.write("budget.csv", budget_csv(curve));

        const AntiResonanceReport primary =
            find_anti_resonance(bundle.front, bundle.end, settings.dip_bracket_lo_hz * kTwoPi,
                                settings.dip_bracket_hi_hz * kTwoPi);

        nlohmann::json report;
        report["cavity"]["bandwidth_hz"] = bundle.cavity.bandwidth_rad_s() / kTwoPi;
        report["cavity"]["finesse"] = bundle.cavity.finesse;
        report["cavity"]["length_m"] = bundle.cavity.length_m;
        report["cavity"]["wavelength_m"] = bundle.cavity.wavelength_m;
        report["shot_floor_m_per_sqrt_hz"] =
            shot_noise_floor(bundle.cavity, bundle.beams.probe_power_w);
        report["anti_resonance"] = dip_json(primary);

        // Second dip above the upper resonance, when the grid leaves room.
        const double end_res_hz = bundle.end.modes.front().resonance_hz();
        if (settings.grid_hi_hz > end_res_hz + 200.0) {
            const AntiResonanceReport secondary =
                find_anti_resonance(bundle.front, bundle.end, (end_res_hz + 100.0) * kTwoPi,
                                    settings.grid_hi_hz * kTwoPi);
            report["secondary_dip"] = dip_json(secondary);
        }

        const double w_dip = primary.dip_rad_s;
        report["at_anti_resonance"]["quantum_optimal_m_per_sqrt_hz"] =
            quantum_optimal_sensitivity(bundle.front, bundle.end, w_dip);
        report["at_anti_resonance"]["optimal_power_w"] =
            optimal_power(bundle.cavity, bundle.front, bundle.end, w_dip);
        report["at_anti_resonance"]["force_sql_front_n_per_sqrt_hz"] =
            force_sql(bundle.front, w_dip);
        report["at_anti_resonance"]["force_sql_end_n_per_sqrt_hz"] =
            force_sql(bundle.end, w_dip);
        report["at_anti_resonance"]["force_min_front_sensor_n_per_sqrt_hz"] =
            force_min_with_cancellation(bundle.front, bundle.end, MirrorSide::Front, w_dip);
        report["at_anti_resonance"]["force_min_end_sensor_n_per_sqrt_hz"] =
            force_min_with_cancellation(bundle.front, bundle.end, MirrorSide::End, w_dip);
        sink.write("budget_report.json", report.dump(2) + "\n");

        std::vector<double> freq_hz(curve.freq_rad_s.size());
        for (size_t i = 0; i < freq_hz.size(); ++i) freq_hz[i] = curve.freq_rad_s[i] / kTwoPi;
        try_plot(sink, "budget.svg", "sensitivity budget",
                 {{"shot", "#888888", &freq_hz, &curve.shot},
                  {"back_action", "#cc3333", &freq_hz, &curve.back_action},
                  {"thermal_front", "#3366cc", &freq_hz, &curve.thermal_front},
                  {"thermal_end", "#33aa55", &freq_hz, &curve.thermal_end},
                  {"total", "#000000", &freq_hz, &curve.total}},
                 ctx.no_plot);
        finalize(sink, start);
    });
}

int cmd_campaign(const CommandContext& ctx) {
    return run_guarded("campaign", [&] {
        const auto start = Clock::now();
        const Config cfg = load_config(ctx);
        const ModelBundle bundle = build_model(cfg);
        if (!bundle.campaign) throw ConfigError("missing section [campaign]");

        CampaignConfig campaign = *bundle.campaign;
        if (ctx.seed_override) campaign.seed = *ctx.seed_override;

        const CampaignResult result = run_campaign(campaign);

        OutputSink sink = make_sink(ctx, cfg, "campaign");
        sink.manifest.seed = campaign.seed;
        sink.manifest.seeded = true;
        for (const auto& w : result.warnings) sink.manifest.warnings.push_back(w);

        sink.write("campaign.csv", campaign_csv(result.traces));

        nlohmann::json report;
        report["seed"] = campaign.seed;
        report["averages"] = campaign.averages;
        report["rbw_hz"] = campaign.rbw_hz;
        report["force_drive_asd_n_per_sqrt_hz"] = result.meta.force_drive_asd_n;
        report["shot_floor_m_per_sqrt_hz"] = result.meta.shot_floor_m;
        report["warnings"] = result.warnings;

        const auto& measured = result.trace(TraceChannel::Measured);
        const auto& ba = result.trace(TraceChannel::BackActionOnly);
        const auto& ind_f = result.trace(TraceChannel::IndividualFront);
        const auto& ind_e = result.trace(TraceChannel::IndividualEnd);
        if (bundle.beams.noise.intensity_noise_rel_shot > 0.0) {
            report["dip"] = dip_json(measure_dip(ba, ind_f, ind_e));
            report["dip_measured_trace"] = dip_json(measure_dip(measured, ind_f, ind_e));
        }
        if (bundle.beams.signal && bundle.beams.signal->amplitude > 0.0) {
            const auto snr =
                measure_line_snr(measured, bundle.beams.signal->frequency_rad_s);
            report["signal"]["freq_hz"] = bundle.beams.signal->frequency_rad_s / kTwoPi;
            report["signal"]["amplitude"] = bundle.beams.signal->amplitude;
            report["signal"]["snr_power"] = snr.snr_power;
            report["signal"]["snr_amplitude"] = std::sqrt(snr.snr_power);
            report["signal"]["local_floor_asd"] = snr.floor_asd;
        }
        sink.write("campaign_report.json", report.dump(2) + "\n");

        const auto& thermal = result.trace(TraceChannel::ThermalOnly);
        try_plot(sink, "campaign.svg", "synthesized measurement",
                 {{"measured", "#000000", &measured.freq_hz, &measured.asd},
                  {"thermal_only", "#3366cc", &thermal.freq_hz, &thermal.asd},
                  {"back_action_only", "#cc3333", &ba.freq_hz, &ba.asd},
                  {"individual_front", "#cc9933", &ind_f.freq_hz, &ind_f.asd},
                  {"individual_end", "#33aa55", &ind_e.freq_hz, &ind_e.asd}},
                 ctx.no_plot);
        finalize(sink, start);
    });
}

int cmd_fit(const CommandContext& ctx) {
    return run_guarded("fit", [&] {
        const auto start = Clock::now();
        if (ctx.trace_path.empty()) throw ConfigError("missing trace CSV (--trace)");
        const SpectrumTrace trace = read_trace_csv_file(ctx.trace_path);
        const Config cfg = load_config(ctx);
        const ModelBundle bundle = build_model(cfg);

        OutputSink sink = make_sink(ctx, cfg, "fit");

        // Unit sanity: displacement ASDs this large mean the file is probably
        // not in m/sqrt(Hz).
        std::vector<double> sorted(trace.asd);
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        if (median > 1e-3) {
            sink.manifest.warnings.push_back(
                "trace values look too large for m/sqrt(Hz); check units");
            std::cerr << "fit: warning: trace values look too large for m/sqrt(Hz); "
                         "fit attempted anyway\n";
        }

        DoubletGuess guess;
        if (bundle.fit.guess) {
            guess = *bundle.fit.guess;
        } else {
            guess = auto_guess(trace, bundle.temperature_k);
        }
        const FitResult fit =
            fit_thermal_doublet(trace, bundle.temperature_k, guess, bundle.fit.options);

        nlohmann::json j;
        j["converged"] = fit.converged;
        j["identifiable"] = fit.identifiable;
        j["message"] = fit.message;
        j["iterations"] = fit.iterations;
        j["residual_norm"] = fit.residual_norm;
        j["params"]["freq_front_hz"] = fit.freq_front_rad_s / kTwoPi;
        j["params"]["freq_end_hz"] = fit.freq_end_rad_s / kTwoPi;
        j["params"]["mass_front_kg"] = fit.mass_front_kg;
        j["params"]["mass_end_kg"] = fit.mass_end_kg;
        j["params"]["q_front"] = fit.q_front;
        j["params"]["q_end"] = fit.q_end;
        j["params"]["floor_asd"] = fit.floor_asd;
        j["sigma"]["freq_front_hz"] = fit.sigma_freq_front_rad_s / kTwoPi;
        j["sigma"]["freq_end_hz"] = fit.sigma_freq_end_rad_s / kTwoPi;
        j["sigma"]["rel_mass_front"] = fit.sigma_rel_mass_front;
        j["sigma"]["rel_mass_end"] = fit.sigma_rel_mass_end;
        j["sigma"]["rel_q_front"] = fit.sigma_rel_q_front;
        j["sigma"]["rel_q_end"] = fit.sigma_rel_q_end;
        j["sigma"]["floor_asd"] = fit.sigma_floor_asd;
        sink.write("fit_result.json", j.dump(2) + "\n");

        // Overlay: data, fitted total, per-mirror components.
        std::vector<double> model_total(trace.freq_hz.size());
        std::vector<double> model_front(trace.freq_hz.size());
        std::vector<double> model_end(trace.freq_hz.size());
        const MechanicalMode mode_f(fit.freq_front_rad_s, fit.mass_front_kg, fit.q_front);
        const MechanicalMode mode_e(fit.freq_end_rad_s, fit.mass_end_kg, fit.q_end);
        for (size_t i = 0; i < trace.freq_hz.size(); ++i) {
            const double w = trace.freq_hz[i] * kTwoPi;
            model_front[i] = thermal_noise_asd(mode_f, bundle.temperature_k, w);
            model_end[i] = thermal_noise_asd(mode_e, bundle.temperature_k, w);
            model_total[i] = std::sqrt(model_front[i] * model_front[i] +
                                       model_end[i] * model_end[i] +
                                       fit.floor_asd * fit.floor_asd);
        }
        try_plot(sink, "fit.svg", "thermal doublet fit",
                 {{"data", "#888888", &trace.freq_hz, &trace.asd},
                  {"fit_total", "#000000", &trace.freq_hz, &model_total},
                  {"front_component", "#3366cc", &trace.freq_hz, &model_front},
                  {"end_component", "#33aa55", &trace.freq_hz, &model_end}},
                 ctx.no_plot);
        finalize(sink, start);
    });
}

}  // namespace dualcav::cli
